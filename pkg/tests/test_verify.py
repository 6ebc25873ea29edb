import pytest

from gribov.verify import REGISTRY, run_check, select

# invariant entries per module; verify must cover each of them
EXPECTED_COUNTS = {"basis_ops": 4, "jacobi": 6, "ortho_poly": 5, "deficiency": 5, "inverse_op": 6, "cli": 1}


@pytest.mark.parametrize("check", REGISTRY, ids=lambda c: c.key)
def test_invariant(check):
    res = run_check(check)
    assert res.ok, res.line()


def test_registry_covers_every_module():
    counts = {}
    for c in REGISTRY:
        counts[c.module] = counts.get(c.module, 0) + 1
    assert counts == EXPECTED_COUNTS


def test_keys_unique():
    keys = [c.key for c in REGISTRY]
    assert len(keys) == len(set(keys))


def test_select():
    assert {c.module for c in select(["jacobi"])} == {"jacobi"}
    assert [c.key for c in select(["ortho_poly.parity"])] == ["ortho_poly.parity"]
    with pytest.raises(KeyError):
        select(["missing.check"])


def test_failure_is_reported_by_name():
    from gribov.verify import Check

    def boom():
        raise RuntimeError("broken")

    res = run_check(Check("demo", "crash", "raises", boom))
    assert not res.ok and res.line() == "FAIL demo.crash: RuntimeError: broken"
