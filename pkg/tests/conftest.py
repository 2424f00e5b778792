import sys
from pathlib import Path

import numpy as np
import pytest

from f0priv.trajectory import F0Trajectory

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def make_traj(values, hop=0.01, rid="t"):
    return F0Trajectory(frame_hop=hop, values=np.asarray(values, dtype=float), recording_id=rid)


@pytest.fixture
def traj_fixture():
    return make_traj([0.0, 100.0, 120.0, 0.0, 110.0])
