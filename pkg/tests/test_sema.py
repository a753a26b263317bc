import pytest

from bitsyntax import analyze, analyze_unit, check_ids, fold_consts, parse_source
from bitsyntax.diagnostics import SemanticErrors
from bitsyntax.frontend import ast

from . import support


def diags_of(source):
    spec, diags = analyze_unit(parse_source(source, "t.fl"))
    return spec, diags


def codes(diags):
    return [d.code for d in diags if d.is_error]


# -- scoping ------------------------------------------------------------------


def test_scoping_rules_example():
    spec, diags = diags_of(
        """
        class A {
          int i = 1;
          int(2) a;
          if (a == 2) {
            int j = i;
            int i = 2;
            int a;
          }
        }
        class B {
          A a;
          a.j = 1;
          int j = a.a + 1;
          j = a.i + 2;
          int(3) b;
        }
        """
    )
    assert spec is None
    errors = [d for d in diags if d.is_error]
    assert len(errors) == 2
    hide, member = errors
    assert hide.code == "E110" and "hides a parsable" in hide.message
    assert member.code == "E115" and "not a class member" in member.message
    # Diagnostics are ordered by location and carry positions.
    assert hide.location.line < member.location.line
    assert hide.location.file == "t.fl"


def test_inner_plain_may_hide_outer_plain():
    spec, diags = diags_of(
        "class A { int i = 1; int(2) a; if (a == 1) { int i = 2; } }"
    )
    assert spec is not None


def test_hiding_base_parsable_allowed():
    spec, diags = diags_of(
        """
        class A { int(2) x; }
        class B extends A { int(3) x; }
        """
    )
    assert spec is not None, diags


def test_parsable_redeclaration_rules():
    spec, _ = diags_of(
        "class A { int(2) c; if (c == 1) { int(16) b; } else { int(24) b; } }"
    )
    assert spec is not None
    # Same size is fine too (the isidof loop pattern re-declares identically).
    spec, _ = diags_of("class A { int(8)* i; int(2) x; int(8)* i; }")
    assert spec is not None
    _, diags = diags_of("class A { int(16) b; unsigned int(24) b; }")
    assert "E111" in codes(diags)
    _, diags = diags_of("class A { const int(2) b = 1; int(3) b; }")
    assert "E112" in codes(diags)


def test_parsable_not_lvalue():
    _, diags = diags_of("class A { int(2) a; a = 1; }")
    assert "E113" in codes(diags)
    _, diags = diags_of("class A { int(2) a; a++; }")
    assert "E113" in codes(diags)
    _, diags = diags_of("class A { int(2) a; int x = a + 1; }")
    assert codes(diags) == []


def test_global_scope_constants_only():
    _, diags = diags_of("int a = 1;")
    assert "E100" in codes(diags)
    _, diags = diags_of("int(3) a = 1;")
    assert "E100" in codes(diags)
    spec, _ = diags_of("const int a = 1;")
    assert spec is not None


def test_members_are_union_of_parsables_toplevel_plain_and_params():
    source = """
    class C(int p, int q[2]) {
      int top = 1;
      int(2) a;
      if (a == 1) {
        int inner = 2;
        int(3) deep;
        if (a == 0) {
          int(4) deeper;
        }
      }
    }
    """
    spec = analyze(parse_source(source))
    info = spec.classes["C"]
    # Brute-force walk of the AST, independently of the analyzer's tables.
    parsables = {
        s.name
        for s in ast.walk_stmts(info.decl.body)
        if isinstance(s, ast.VarDecl) and s.parse_size is not None
    }
    toplevel_plain = {
        s.name
        for s in info.decl.body
        if isinstance(s, ast.VarDecl) and s.parse_size is None
    }
    params = {p.name for p in info.decl.params}
    assert set(info.members) == parsables | toplevel_plain | params
    assert info.members["deep"].kind == "parsable"
    assert info.members["top"].kind == "plain"
    assert info.members["p"].kind == "param"
    assert "inner" not in info.members


# -- types ---------------------------------------------------------------------


def test_float_parse_sizes():
    _, diags = diags_of("class A { float(16) x; }")
    assert "E116" in codes(diags)
    _, diags = diags_of("class A { double(32) x; }")
    assert "E116" in codes(diags)
    spec, _ = diags_of("class A { float(32) x; double(64) y; float(0) z; }")
    assert spec is not None


def test_conditions_must_be_boolean():
    _, diags = diags_of("class A { int x = 1; if (x) { int y = 2; } }")
    assert "E119" in codes(diags)
    _, diags = diags_of("class A { int x = 1; while (x + 1) { } }")
    assert "E119" in codes(diags)
    _, diags = diags_of("class A { int x = 1; int y = x && 1 == 1 ? 1 : 2; }")
    assert "E119" in codes(diags)
    spec, _ = diags_of("class A { int x = 1; if (x == 1) { int y = 2; } }")
    assert spec is not None


def test_switch_checks():
    _, diags = diags_of("class A { int x = 1; switch (x) { case x: break; } }")
    assert "E120" in codes(diags)
    _, diags = diags_of(
        "class A { int x = 1; switch (x) { case 1: break; case 1: break; } }"
    )
    assert "E162" in codes(diags)
    _, diags = diags_of(
        "class A { int x = 1; switch (x) { default: break; default: break; } }"
    )
    assert "E163" in codes(diags)
    _, diags = diags_of("class A { float f = 1.0; switch (f) { case 1: break; } }")
    assert "E147" in codes(diags)


def test_break_continue_placement():
    _, diags = diags_of("class A { break; }")
    assert "E135" in codes(diags)
    _, diags = diags_of("class A { int x = 1; switch (x) { case 1: continue; } }")
    assert "E135" in codes(diags)
    spec, _ = diags_of("class A { for (;;) { break; } }")
    assert spec is not None


def test_undeclared_and_use_before_declaration():
    _, diags = diags_of("class A { int x = y + 1; }")
    assert "E114" in codes(diags)
    _, diags = diags_of("class A { int x = b; int(3) b; }")
    assert "E114" in codes(diags)


def test_param_checks():
    _, diags = diags_of("class A(int p, int p) { int(2) x; }")
    assert "E143" in codes(diags)
    _, diags = diags_of(
        "class A(int p) { int(p) x; }\nclass B { A a; }"
    )
    assert "E121" in codes(diags)
    _, diags = diags_of(
        "class A(int p[2]) { int(2) x; }\nclass B { int v; A a(v); }"
    )
    assert "E122" in codes(diags)
    spec, _ = diags_of(support.SIMPLE_PARAMS)
    assert spec is not None


def test_param_cannot_hide_id():
    _, diags = diags_of("class A(int id) : int(2) id = 1 { int(2) x; }")
    assert "E149" in codes(diags)


def test_string_initializer_sizes():
    spec, _ = diags_of('class A { char(8) s[6] = "GIF87a"; }')
    assert spec is not None
    spec, _ = diags_of('class A { char(8) s[7] = "GIF87a"; }')
    assert spec is not None  # one extra slot: trailing null
    _, diags = diags_of('class A { char(8) s[9] = "GIF87a"; }')
    assert "E138" in codes(diags)


def test_lengthof_needs_parsable():
    _, diags = diags_of("class A { int x = 1; int y = lengthof(x); }")
    assert "E136" in codes(diags)


def test_class_type_resolution():
    _, diags = diags_of("class A { Unknown u; }")
    assert "E102" in codes(diags)


# -- constants -------------------------------------------------------------------


def test_fold_consts():
    spec = analyze(parse_source("const int a = 4;\nconst int z = 8 / 2;\n"
                                "class T { int(a) t; }"))
    assert spec.constants == {"a": 4, "z": 4}
    assert fold_consts(spec) is spec


def test_const_division_by_zero():
    _, diags = diags_of("const int z = 8 / 0;")
    assert "E133" in codes(diags)


def test_const_requires_constant():
    _, diags = diags_of("class K { int(2) k; }\nconst int z = 1 + q;")
    assert "E134" in codes(diags)


# -- object ids --------------------------------------------------------------------


def test_id_family_valid():
    spec = analyze(parse_source(support.POLY_FAMILY))
    assert spec.family_entries("A") == [(0, 0, "A"), (-1, -1, "B")]
    assert check_ids(spec) == []


def test_id_duplicate_value():
    _, diags = diags_of(
        """
        class A : int(4) id = 3 { int(2) a; }
        class B extends A : int(4) id = 3 { int(3) b; }
        """
    )
    assert "E125" in codes(diags)


def test_id_range_overlap_matches_interval_oracle():
    lo1, hi1 = 0x101, 0x1AF
    lo2, hi2 = 0x1A0, 0x1FF
    assert max(lo1, lo2) <= min(hi1, hi2)  # brute-force interval intersection
    _, diags = diags_of(
        f"""
        class A : bit(32) code = {lo1} .. {hi1} {{ int(2) a; }}
        class B extends A : bit(32) code = {lo2} .. {hi2} {{ int(2) b; }}
        """
    )
    assert "E125" in codes(diags)
    # Disjoint ranges pass.
    spec, diags = diags_of(
        """
        class A : bit(32) code = 257 .. 431 { int(2) a; }
        class B extends A : bit(32) code = 432 .. 511 { int(2) b; }
        """
    )
    assert spec is not None


def test_id_value_must_be_constant():
    _, diags = diags_of("class K { int(2) k; }\nclass A : int(4) id = 2 * q { int(2) a; }")
    assert "E124" in codes(diags)


def test_id_type_restrictions():
    _, diags = diags_of(
        "class K { int(2) x; }\nclass A : K(4) id = 1 { int(2) a; }"
    )
    assert "E128" in codes(diags)
    _, diags = diags_of("class A : float(32) id = 1 { int(2) a; }")
    assert "E128" in codes(diags)


def test_id_field_consistency_between_base_and_derived():
    _, diags = diags_of(
        """
        class A : int(4) id = 0 { int(2) a; }
        class B extends A : int(5) id = 1 { int(2) b; }
        """
    )
    assert "E126" in codes(diags)
    _, diags = diags_of(
        """
        class A : int(4) id = 0 { int(2) a; }
        class B extends A : int(4) kind = 1 { int(2) b; }
        """
    )
    assert "E126" in codes(diags)


def test_id_redeclared_in_body():
    _, diags = diags_of("class A : int(4) id = 0 { int(3) id; }")
    assert "E127" in codes(diags)


def test_id_range_bounds():
    _, diags = diags_of("class A : bit(8) id = 5 .. 2 { int(2) a; }")
    assert "E144" in codes(diags)
    _, diags = diags_of("class A : bit(2) id = 0 .. 7 { int(2) a; }")
    assert "E164" in codes(diags)


def test_abstract_instantiation():
    _, diags = diags_of(
        "abstract class A { int(2) a; }\nclass T { A x; }"
    )
    assert "E129" in codes(diags)
    # With a dispatchable family, declaring the abstract base is fine.
    spec, _ = diags_of(support.ISIDOF_SEQ)
    assert spec is not None


def test_isidof_needs_family():
    _, diags = diags_of("class A { int(2) a; }\nclass T { int x = isidof(A, 1); }")
    assert "E137" in codes(diags)


def test_inheritance_cycle():
    _, diags = diags_of(
        "class A extends B { int(2) a; }\nclass B extends A { int(2) b; }"
    )
    assert "E142" in codes(diags)


# -- maps --------------------------------------------------------------------------


def test_map_type_match():
    _, diags = diags_of(
        "map M(int) { 0b0, 1 }\nclass T { unsigned int(M) v; }"
    )
    assert "E118" in codes(diags)
    spec, _ = diags_of("map M(int) { 0b0, 1 }\nclass T { int(M) v; }")
    assert spec is not None


def test_map_prefix_violation_diagnosed():
    _, diags = diags_of("map A(int) { 0b0, 1, 0b01, 2 }")
    assert "E130" in codes(diags)


def test_map_entry_arity():
    _, diags = diags_of(
        """
        class Y { int a; int b; }
        map M(Y) { 0b0, {1, 2, 3} }
        """
    )
    assert "E131" in codes(diags)


def test_map_cycle():
    _, diags = diags_of(
        """
        map A(int) { 0b0, 1, 0b1, int(B) }
        map B(int) { 0b0, 2, 0b1, int(A) }
        """
    )
    assert "E132" in codes(diags)


def test_map_nested_output_type_must_match():
    _, diags = diags_of(
        """
        map B(float) { 0b0, 1.0 }
        map A(int) { 0b0, 1, 0b1, int(B) }
        """
    )
    assert "E166" in codes(diags)


def test_class_typed_needs_map_size():
    _, diags = diags_of("class Y { int a; }\nclass T { Y(3) v; }")
    assert "E118" in codes(diags)


# -- misc ---------------------------------------------------------------------------


def test_pragma_options_recorded():
    spec = analyze(parse_source(
        """
        %pragma put, get, trace, array=128
        class Example {
          %pragma noput
          unsigned int(10) length;
          %pragma array=1024
          char(3) data[length];
          %pragma array=128
          %pragma trace="Tracer.trace"
        }
        class After { int(2) x; }
        """
    ))
    example = spec.classes["Example"]
    assert example.options.put is False
    assert example.options.get is True
    assert example.options.trace_name == "Tracer.trace"
    decls = [s for s in ast.walk_stmts(example.decl.body) if isinstance(s, ast.VarDecl)]
    assert decls[0].array_cap == 128  # length: before the array=1024 pragma
    assert decls[1].array_cap == 1024  # data: right after it
    # Settings persist past the end of the class.
    assert spec.classes["After"].options.put is False


def test_unknown_pragma_warns():
    spec, diags = diags_of("%pragma sideways=3\nclass A { int(2) x; }")
    assert spec is not None
    assert any(d.code == "W001" and d.severity == "warning" for d in diags)


def test_analyze_deterministic():
    src = """
    class A { int i = 1; int(2) a; if (a == 2) { int a; } }
    class B { A a; a.j = 1; }
    """
    _, first = diags_of(src)
    _, second = diags_of(src)
    assert [d.render() for d in first] == [d.render() for d in second]


def test_analyze_raises_with_diagnostics():
    with pytest.raises(SemanticErrors) as err:
        analyze(parse_source("class A { float(16) x; }"))
    assert any(d.code == "E116" for d in err.value.diagnostics)


def test_diagnostic_render_format():
    _, diags = diags_of("class A { float(16) x; }")
    line = [d for d in diags if d.is_error][0].render()
    assert line.startswith("t.fl:1:")
    assert ": error[E116]: " in line


def test_all_fixture_schemas_analyze_clean():
    for name, source, entry, _gen in support.ROUNDTRIP_FIXTURES:
        spec, diags = analyze_unit(parse_source(source, name))
        assert spec is not None, (name, [d.render() for d in diags])
        assert spec.classes[entry].is_parsable
