"""Labelled image galleries backed by a manifest.tsv file.

A gallery directory holds PGM files plus a manifest of
``label<TAB>relative_path`` lines (UTF-8, LF). Loading decodes every file,
so a gallery that validates is a gallery the pipeline can use.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .image_io import GrayImage, load_pgm, save_pgm

MANIFEST_NAME = "manifest.tsv"


@dataclass(frozen=True)
class GalleryEntry:
    label: str
    rel_path: str
    image: GrayImage


@dataclass(frozen=True)
class Gallery:
    root: Path
    entries: list
    checksum: str

    @property
    def labels(self) -> list[str]:
        """Distinct subject labels in first-appearance order."""
        seen = []
        for e in self.entries:
            if e.label not in seen:
                seen.append(e.label)
        return seen

    def by_label(self, label: str) -> list:
        return [e for e in self.entries if e.label == label]


def load_gallery(root) -> Gallery:
    """Read the manifest and decode every referenced image."""
    root = Path(root)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {root}")
    raw = manifest.read_bytes()
    digest = hashlib.sha256(raw)
    entries = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"{manifest}:{lineno}: expected 'label<TAB>relative_path'")
        label, rel = parts
        path = root / rel
        if not path.is_file():
            raise FileNotFoundError(f"{manifest}:{lineno}: missing image file {path}")
        data = path.read_bytes()
        digest.update(data)
        try:
            image = load_pgm(data)
        except ValueError as exc:
            raise ValueError(f"{manifest}:{lineno}: {path} is not a valid PGM: {exc}") from exc
        entries.append(GalleryEntry(label=label, rel_path=rel, image=image))
    if not entries:
        raise ValueError(f"{manifest}: gallery is empty")
    return Gallery(root=root, entries=entries, checksum=digest.hexdigest())


def write_gallery(root, items) -> Gallery:
    """Write (label, filename, image) triples plus a manifest, then reload."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for label, name, image in items:
        (root / name).write_bytes(save_pgm(image))
        lines.append(f"{label}\t{name}")
    (root / MANIFEST_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return load_gallery(root)
