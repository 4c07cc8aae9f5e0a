import numpy as np
import pytest

from voxaffect.features import FeatureVector

# Mean vocal statistics of the two reference speakers:
# (pitch Hz, level dB, ascend s, descend s, gap s)
NORMAL = [
    FeatureVector(1248.0, -50.0, 0.12, 0.11, 0.12),
    FeatureVector(1355.0, -48.0, 0.06, 0.05, 0.12),
]
ANGRY = [
    FeatureVector(1541.0, -30.0, 0.13, 0.10, 0.09),
    FeatureVector(1652.0, -29.0, 0.06, 0.04, 0.10),
]
PANICKED = [
    FeatureVector(1443.0, -46.0, 0.13, 0.09, 0.13),
    FeatureVector(1560.0, -44.0, 0.07, 0.04, 0.14),
]

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def sine(freq, seconds, fs, amplitude=1.0):
    t = np.arange(int(round(seconds * fs))) / fs
    return amplitude * np.sin(2 * np.pi * freq * t)


@pytest.fixture
def normal_spec():
    from voxaffect.synth import UtteranceSpec, WordSpec

    return UtteranceSpec([WordSpec(200.0, 0.05, 0.1, 0.25, 0.1, 0.12)] * 4, sample_rate=16000)
