import pytest

from bitsyntax.frontend import parse_source, pretty

from . import support

TRICKY = """
%pragma put, get, trace, array=128

const int a = 4;
const int z = 8 / 2;

%{ class-scope verbatim; keep "bytes" intact %}

map escape_code(int) {
  0b0, 1,
  0b10, 2,
  0b11, unsigned int(5)
}

class Weird(int p, float q[2]) {
  %pragma noput
  aligned(32) little unsigned int(16) w = 0x1234;
  int(2) arr[[3]] = 1;
  int(4) B[[2]][3];
  signed char(8) s[7] = "string";
  double(64) d = 1.5;
  int x = -(-a) + +4;
  int y = (1 + 2) * 3 % 4;
  bit(3)* look;
  if (x == 1 && y < 2 || !(x > 3)) {
    int(escape_code) e;
  } else {
    int(24) e;
  }
  for (x = 0; x < 4; x++) {
    int(1) bits;
  }
  do {
    int(8) c;
  } while (c != ';');
  switch (y) {
    case 1:
    case a:
      int(2) m;
      break;
    default:
      int(3) m;
  }
  x = y = x += 2;
  int t = x > 0 ? y : -y;
  %g{ get-side code %g}
  %p.j{ put-side java %p.j}
}

class Other extends Weird : int(8) kind = 2 .. 7 {
  int j = lengthof(B[2]);
  int k = isidof(Other, j);
}
"""


@pytest.mark.parametrize(
    "source",
    [
        support.HELLOBITS,
        support.COND_PARAM,
        support.SIMPLE_PARAMS,
        support.ARRAYS_DYNAMIC,
        support.PARTIAL_ARRAYS,
        support.INHERIT_PLAIN,
        support.POLY_FAMILY,
        support.SLICE_RANGE,
        support.MAPS_SCHEMA,
        support.ISIDOF_SEQ,
        support.ALIGNED_FIELDS,
        support.LENGTHOF_ARRAY,
        support.GIF87A,
        TRICKY,
    ],
    ids=lambda s: str(abs(hash(s)) % 10_000),
)
def test_parse_pretty_parse_is_identity(source):
    unit = parse_source(source)
    text = pretty(unit)
    again = parse_source(text)
    assert again == unit
    # And the canonical rendering is a fixed point.
    assert pretty(again) == text


def test_verbatim_reemitted_byte_identical():
    src = "%g.c{  exact\n bytes \t here  %g.c}"
    unit = parse_source(src)
    assert pretty(unit).strip() == src


def test_pragmas_reemitted_in_place():
    src = "\n".join(
        [
            "%pragma array=64",
            "class A {",
            "  int(2) x;",
            '  %pragma trace="T.t"',
            "}",
        ]
    )
    unit = parse_source(src)
    text = pretty(unit)
    assert "%pragma array=64" in text
    assert '%pragma trace="T.t"' in text
    assert text.index("array=64") < text.index("class A")
    again = parse_source(text)
    assert [s for _, s in again.pragma_events] == [s for _, s in unit.pragma_events]


def test_include_directives_reemitted():
    src = '%include "other.fl"\n%import "more.fl"\nclass A { int(1) x; }'
    unit = parse_source(src)
    text = pretty(unit)
    assert '%include "other.fl"' in text
    assert '%import "more.fl"' in text
    assert parse_source(text) == unit
