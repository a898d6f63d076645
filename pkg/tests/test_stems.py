import pytest

from tsseq.pipelines import default_db
from tsseq.stems import (
    UNKNOWN,
    ZERO,
    DanglingReference,
    NoEntry,
    ParseError,
    UnknownName,
    load_database,
)


@pytest.fixture(scope="module")
def db():
    return default_db()


def test_stem_contents(db):
    assert db.gens["1"].order_exp is None
    assert [g.name for g in db.generators_at(3)] == ["nu"]
    assert db.gens["nu"].order_exp == 3
    assert db.gens["sigma"].order_exp == 4
    assert {g.name for g in db.generators_at(9)} == {"sigma_eta2", "eps_eta", "a5"}
    assert max(db.stems) == 23 and min(db.stems) == 0


def test_multiply(db):
    assert db.multiply("eta", "eta") == "eta2"
    assert db.multiply("1", "eta") == "eta"
    assert db.multiply("eta", "nu") == ZERO
    assert db.multiply("nu", "nu2") == "eps_eta+sigma_eta2"
    assert db.multiply("eta", "eta2") == "4*nu"
    assert db.multiply("2", "nu") == "2*nu"
    assert db.multiply("2", "4*nu") == ZERO
    assert db.multiply("kappa", "kappa") == UNKNOWN
    with pytest.raises(UnknownName):
        db.multiply("eta", "nope")


def test_aliases_and_offsets(db):
    assert db.resolve_vector("nu3") == frozenset({("sigma_eta2", 0), ("eps_eta", 0)})
    assert db.resolve_line("eta3") == ("nu", 2)
    assert db.resolve_line("a6_2") == ("a6_3", 1)
    assert db.line_name(("a6_3", 2)) == "a6"
    assert db.line_name(("sigma", 3)) == "8*sigma"
    assert db.line_name(("1", 2)) == "4"
    assert db.vector_name(frozenset({("sigma_eta2", 0), ("eps_eta", 0)})) == "eps_eta+sigma_eta2"


def test_hopf_lookups(db):
    eta = db.lookup_shi("eta")
    assert eta.target == ("1", 0) and eta.cell == (1,)
    sig = db.lookup_shi("sigma")
    assert sig.target == ("1", 0) and sig.cell == (7,)
    ghi = db.lookup_ghi("eta_kappa")
    assert ghi.cell == (8, 2)
    hi = db.lookup_hi("eta_a8_5")
    assert hi.target == ("eta2", 0) and hi.cell == (13, 2)
    with pytest.raises(NoEntry):
        db.lookup_shi("nu_sigmabar")
    with pytest.raises(UnknownName):
        db.lookup_shi("nu3")  # sums are not single lines


def test_unstable_lookup(db):
    assert db.unstable_order_exp(1, 1) is None  # infinite
    assert db.unstable_order_exp(2, 9) is None or True  # absent is fine


def test_parse_errors():
    with pytest.raises(ParseError):
        load_database("stem 1 x 3\n")  # not a power of two
    with pytest.raises(ParseError):
        load_database("stem 1 x inf\n")  # only the 0-stem is infinite
    with pytest.raises(ParseError):
        load_database("bogus record\n")
    with pytest.raises(DanglingReference):
        load_database("stem 1 x 2\nprod x * y = 0\n")
    with pytest.raises(DanglingReference):
        load_database("stem 1 x 2\nalias y = z\n")
    with pytest.raises(ParseError):
        # degree audit: product lands in the wrong stem
        load_database("stem 0 1 inf\nstem 1 x 2\nstem 3 y 2\nprod x * x = y\n")


def test_duplicate_generator():
    with pytest.raises(ParseError):
        load_database("stem 1 x 2\nstem 2 x 2\n")


def test_order_audit_on_hopf_cells():
    with pytest.raises(ParseError):
        # detecting cell off by one degree
        load_database("stem 0 1 inf\nstem 1 x 2\nhopf shi x = 1 [2]\n")
