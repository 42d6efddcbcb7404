"""Shared fixtures: seeded images and small galleries."""

import numpy as np
import pytest

from imgauth.image_io import GrayImage
from imgauth.rng import Lcg64


def lcg_noise_image(seed: int, height: int = 128, width: int = 128) -> GrayImage:
    """Platform-stable uniform noise image from the package LCG."""
    gen = Lcg64(seed)
    return GrayImage(np.array(gen.uniforms(height * width)).reshape(height, width))


@pytest.fixture
def rng():
    return np.random.default_rng(20240803)


@pytest.fixture
def noise_image():
    return lcg_noise_image(4242)
