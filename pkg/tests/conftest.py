import random
from dataclasses import dataclass

import pytest

from vanet_ibgs.algebra import make_transparent_context
from vanet_ibgs.ibgs import (
    accept_join, join_issue, keygen_gm, keygen_tsd, keygen_vehicle, pok_prove, setup,
)
from vanet_ibgs.opener import RegistrationTable

TSD = b"tsd-0"


@dataclass
class Fleet:
    params: object
    tea: object
    gm: object
    opener: object
    creds: list
    table: RegistrationTable

    @property
    def ctx(self):
        return self.params.ctx


def enrol(seed=0, vehicles=4, gm_id=b"gm-0", ctx=None, table_path=None):
    ctx = ctx or make_transparent_context(seed)
    rng = random.Random(f"fleet:{seed}")
    params, tea = setup(ctx, rng)
    gm = keygen_gm(params, tea, gm_id, rng)
    opener = keygen_tsd(params, tea, TSD)
    table = RegistrationTable(ctx, table_path)
    creds = []
    for i in range(vehicles):
        vk = keygen_vehicle(params, tea, f"car-{seed}-{i}")
        resp, _ = join_issue(gm, params, vk.ID_V, pok_prove(params, vk, b"n%d" % i, rng), rng, table)
        creds.append(accept_join(params, vk, resp, gm_id))
    return Fleet(params, tea, gm, opener, creds, table)


@pytest.fixture
def fleet():
    return enrol(seed=11)
