import random

import pytest

from erblock.model import CLEAN_CLEAN, DIRTY, EntityCollection, EntityDescription, Value

VOCAB = [f"w{i}" for i in range(40)]


def random_collection(rng: random.Random, n: int | None = None, mode: str = DIRTY,
                      max_tokens: int = 20, attributes: int = 4) -> EntityCollection:
    """Small random collection; values are space-joined tokens from a shared vocabulary."""
    n = rng.randint(0, 50) if n is None else n
    descriptions = []
    for i in range(n):
        source = "A" if (mode == DIRTY or i % 2 == 0) else "B"
        k = rng.randint(0, max_tokens)
        tokens = [rng.choice(VOCAB) for _ in range(k)]
        pairs = []
        for j, tok in enumerate(tokens):
            pairs.append((f"{source.lower()}{j % attributes}", Value.literal(tok)))
        descriptions.append(EntityDescription(f"d{i:02d}", tuple(pairs), source))
    sources = ("A", "B") if mode == CLEAN_CLEAN else ()
    return EntityCollection(tuple(descriptions), mode, sources)


@pytest.fixture
def rng():
    return random.Random(1234)


# ---- acceptance reporting -------------------------------------------------

ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(check: str, ok: bool, detail: str = "") -> bool:
    """Remember one acceptance sub-check; the session summary prints them all."""
    ACCEPTANCE.append((check, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    by_criterion: dict[str, bool] = {}
    for check, ok, detail in ACCEPTANCE:
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {check}  {detail}".rstrip())
        crit = check.split(".")[0]
        by_criterion[crit] = by_criterion.get(crit, True) and ok
    tr.write_line("")
    for crit, ok in sorted(by_criterion.items(), key=lambda kv: int(kv[0][1:])):
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit[1:]}")
