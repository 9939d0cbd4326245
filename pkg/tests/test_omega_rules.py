import pytest

from omegalogic.syntax import (
    Atom, BOT, Const, ConstantFamily, Eq, FamilyMember, Forall, Not,
    SchemaConj, Var, parse_formula, parse_vocabulary, print_formula,
)
from omegalogic.structures import Valuation, parse_structure
from omegalogic.omega_rules import (
    SchemaError, Step, applicability_report, check_derivation,
    check_instance_sound, instantiate_schema, parse_derivation,
    print_derivation, refute_extension, refutation_vocabulary,
)


NAT = parse_vocabulary("sort N\nconst 0 : N\nfun S : N -> N\nrel F : N")


def omega_succ():
    voc = parse_vocabulary("sort N\nconst 0 : N\nfun S : N -> N")
    return parse_structure("structure omega\ngenerated by tau", voc)


def ext_vocab():
    return NAT.expand(ConstantFamily("E", "N", members=("d",)))


def test_instantiate_i_omega():
    voc = ext_vocab()
    x = Var("x", "N")
    d = Const("d", "N")
    inst = instantiate_schema(voc, "I_OMEGA", Not(Eq(x, d)), x,
                              params=(d,), family="tau")
    assert inst.premise_family == SchemaConj(x, Not(Eq(x, d)), "tau")
    assert inst.conclusions == (Forall(x, Not(Eq(x, d))),)


def test_i_omega_rejects_base_parameters():
    x = Var("x", "N")
    with pytest.raises(SchemaError):
        instantiate_schema(NAT, "I_OMEGA", Not(Eq(x, Const("0", "N"))), x,
                           params=(Const("0", "N"),), family="tau")


def test_instantiate_s_omega():
    x = Var("x", "N")
    inst = instantiate_schema(NAT, "S_OMEGA", Atom("F", (x,)), x, family="tau")
    assert print_formula(inst.conclusions[0]) == "forall x:N. F(x)"


def test_g_omega_requires_guard():
    voc = parse_vocabulary(
        "sort N\nsort V\nrel N : N\nrel V : V\nrel R1 : N V\n"
        "family c_1 : N countable")
    x = Var("x", "N")
    with pytest.raises(SchemaError):
        instantiate_schema(voc, "G_OMEGA", Atom("R1", (x, x)), x, family="c_1")


def test_schema_regeneration():
    voc = ext_vocab()
    x = Var("x", "N")
    d = Const("d", "N")
    inst = instantiate_schema(voc, "I_OMEGA", Not(Eq(x, d)), x,
                              params=(d,), family="tau")
    again = instantiate_schema(voc, inst.schema, inst.body, inst.hole,
                               inst.params, inst.family)
    assert again == inst


def test_i_omega_sound_on_omega():
    s = omega_succ()
    x = Var("x", "N")
    body = parse_formula("S(x) != x", s.vocab, bound=[("x", "N")])
    inst = instantiate_schema(s.vocab, "I_OMEGA", body, x, family="tau")
    verdict = check_instance_sound(s, inst, fuel=10)
    assert verdict.status == "sound"


def test_s_omega_unsound_on_gapped_valuation():
    # all F(c) true while the universal is false
    x = Var("x", "N")
    voc = parse_vocabulary("sort N\nconst 0 : N\nrel F : N")
    inst = instantiate_schema(voc, "S_OMEGA", Atom("F", (x,)), x, family="tau")
    assignment = {Atom("F", (Const("0", "N"),)): True,
                  Forall(x, Atom("F", (x,))): False}
    v = Valuation(voc, assignment=assignment)
    assert check_instance_sound(v, inst, fuel=5).status == "unsound"


def test_eq_rules():
    t = Const("0", "N")
    inst = instantiate_schema(NAT, "eqI", params=(t,))
    assert inst.conclusions == (Eq(t, t),)


def test_refute_extension_checks():
    s = omega_succ()
    root = refute_extension(s, [], "d")
    voc = refutation_vocabulary(s, "d")
    result = check_derivation(root, [], ("I_OMEGA", "I_FORALL_E", "eqI", "negE"),
                              voc, assumed_families=("tau",))
    assert result.valid, result.reason
    assert root.conclusion == BOT


def test_refute_extension_not_fresh():
    s = omega_succ()
    with pytest.raises(SchemaError):
        refute_extension(s, [], "S")


def test_refutation_derivation_roundtrip():
    s = omega_succ()
    root = refute_extension(s, [], "d")
    voc = refutation_vocabulary(s, "d")
    text = print_derivation(root)
    again = parse_derivation(text, voc)
    assert again == root


def test_check_derivation_rejects_wrong_instance():
    s = omega_succ()
    root = refute_extension(s, [], "d")
    voc = refutation_vocabulary(s, "d")
    # corrupt the eqI step: conclude d = 0 instead of d = d
    bad_eq = Step("eqI", Eq(Const("d", "N"), Const("0", "N")),
                  params=(Const("d", "N"),))
    bad = Step("negE", BOT, (root.children[0], bad_eq))
    result = check_derivation(bad, [], ("I_OMEGA", "I_FORALL_E", "eqI", "negE"),
                              voc, assumed_families=("tau",))
    assert not result.valid


def test_eqi_single_step_valid():
    t = Const("0", "N")
    step = Step("eqI", Eq(t, t), params=(t,))
    assert check_derivation(step, [], ("eqI",), NAT).valid


def test_eigenvariable_violation():
    # forallI whose eigenconstant occurs in an open assumption
    voc = ext_vocab()
    x = Var("x", "N")
    d = Const("d", "N")
    assumption = Step("assumption", Atom("F", (d,)))
    prem = Step("negE", BOT,
                (assumption, Step("assumption", Not(Atom("F", (d,))))))
    # a cheap stand-in: forallI from F(d) under the open assumption F(d)
    body = Atom("F", (x,))
    inner = Step("assumption", Atom("F", (d,)))
    gen = Step("forallI", Forall(x, body), (inner,), params=(d,))
    result = check_derivation(gen, [], ("forallI",), voc)
    assert not result.valid
    assert "assumption" in result.reason or "eigen" in result.reason


def test_dangling_assumption_rejected():
    step = Step("assumption", Atom("F", (Const("0", "N"),)))
    result = check_derivation(step, [], ("eqI",), NAT)
    assert not result.valid


def test_applicability_pure_equality():
    voc = parse_vocabulary("sort S")
    report = applicability_report([], voc, "I_OMEGA")
    assert report["count"] == 0
    assert "no constants" in report["blockers"]


def test_applicability_dense_order():
    voc = parse_vocabulary("sort S\nrel < : S S")
    report = applicability_report([], voc, "I_OMEGA")
    assert report["count"] == 0
    assert "no constants" in report["blockers"]


def test_applicability_named_constants():
    voc = parse_vocabulary("sort S\nfamily C : S countable")
    report = applicability_report([], voc, "I_OMEGA")
    assert report["count"] >= 1
    assert report["blockers"] == []


def test_applicability_g_omega_needs_n_sort():
    voc = parse_vocabulary("sort S\nfamily C : S countable")
    report = applicability_report([], voc, "G_OMEGA")
    assert "no N-sort" in report["blockers"]
