"""Systems and laws shared across the test suite."""

import math

import numpy as np

from inclusionlab.linalg import SystemSpec

PHI = (1 + math.sqrt(5)) / 2
GOLDEN = (math.sqrt(5) - 1) / 2
UPPER_SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])
LOWER_SHEAR = np.array([[1.0, 0.0], [1.0, 1.0]])


def rot(angle):
    """Rotation in the [[cos, sin], [-sin, cos]] convention."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def scalar_half_two():
    return SystemSpec.of([[0.5]], [[2.0]])


def diag_pair():
    return SystemSpec.of(np.diag([2.0, 0.5]), np.diag([3.0, 1.0 / 3.0]))


def scaled_rotations(c=0.99, a=1.0, g=math.sqrt(2)):
    return SystemSpec.of(c * rot(a), c * rot(g))


def golden_rotation_system():
    """Irrational rotation, upper shear, and [[1, 0], [1, 1/2]]."""
    return SystemSpec.of(rot(2 * math.pi * GOLDEN), UPPER_SHEAR, [[1.0, 0.0], [1.0, 0.5]])


def shear_block_system(scale=1.0):
    F1, F2 = scale * UPPER_SHEAR, scale * LOWER_SHEAR
    Z = np.zeros((2, 2))
    return SystemSpec.of(np.block([[F1, F1], [Z, F1]]), np.block([[F2, F2], [Z, F2]])), (F1, F2)


def shear_norm(n):
    """Operator norm of [[1, n], [0, 1]]."""
    return (n + math.sqrt(n * n + 4)) / 2


def random_well_conditioned(rng, d=2, cond_max=20.0):
    while True:
        A = rng.standard_normal((d, d))
        s = np.linalg.svd(A, compute_uv=False)
        if s[-1] > 0.1 and s[0] / s[-1] < cond_max:
            return A


def random_pair_corpus(seed=20240601, count=100):
    rng = np.random.default_rng(seed)
    return [(random_well_conditioned(rng), random_well_conditioned(rng)) for _ in range(count)]
