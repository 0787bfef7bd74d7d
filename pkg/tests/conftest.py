import os

# performance criteria are stated single-threaded
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import numpy as np
import pytest

from trajtok import AgentType, NormalizedDataset, flip_augment, synthetic_dataset


def straight(length_m: float, L: int = 5, heading: float = 0.0) -> np.ndarray:
    """Constant-velocity straight token reaching ``length_m`` along ``heading``."""
    frac = np.arange(1, L + 1) / L
    pts = np.zeros((L, 3))
    pts[:, 0] = frac * length_m * np.cos(heading)
    pts[:, 1] = frac * length_m * np.sin(heading)
    pts[:, 2] = heading
    return pts


def to_point(x: float, y: float, yaw: float = 0.0, L: int = 5) -> np.ndarray:
    """Trajectory ending at (x, y, yaw), interpolated linearly from the origin."""
    frac = np.arange(1, L + 1) / L
    pts = np.zeros((L, 3))
    pts[:, 0] = frac * x
    pts[:, 1] = frac * y
    pts[:, 2] = yaw
    return pts


def dataset_from_endpoints(ends, agent_type=AgentType.VEHICLE, flip_applied=True) -> NormalizedDataset:
    pts = np.stack([to_point(*e) for e in ends]) if len(ends) else np.zeros((0, 5, 3))
    return NormalizedDataset.from_array(pts, agent_type, flip_applied=flip_applied)


@pytest.fixture(scope="session")
def vehicle_data():
    return flip_augment(synthetic_dataset(4000, AgentType.VEHICLE, seed=11))


@pytest.fixture(scope="session")
def cyclist_data():
    return flip_augment(synthetic_dataset(3000, AgentType.CYCLIST, seed=12))


_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    cid, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE.append((cid, title, call.excinfo is None, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0][1:])):
        line = f"{cid} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
