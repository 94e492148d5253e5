"""Smoke test for the forcing_lab_py extension module."""

import forcing_lab_py as fl

alg = fl.Algebra(2)
a0 = alg.element("a0")
assert str(a0.implies(alg.zero())) == "{a1}"
assert str(a0 | ~a0) == "1"
assert alg.ultrafilters() == [0, 1]

assert fl.canonical("forall x.x=x") == "forall x . x = x"
assert fl.ast("z in u") == "(mem (const z) (const u))"

u = fl.Universe(alg, "name z { }\nname u { z : a0 }\n")
assert u.labels() == ["z", "u"]
assert str(u.eval("exists x . x in u")) == "{a0}"
assert str(u.eval("z in y", env=[("y", "u")])) == "{a0}"

q = u.quotient(0)
assert q.class_count() == 2
assert q.collapse() == ["{}", "{{}}"]
assert q.truth("exists x . x in u")
assert u.quotient(1).class_count() == 1

c = fl.Completion("elem p\nelem q\n")
assert c.algebra().atom_count == 2
forcing_names = fl.Universe(c.algebra(), "name z { }\nname u { z : %s }\n" % c.embed("p"))
assert c.forces("p", "z in u", forcing_names)
assert not c.forces("q", "z in u", forcing_names)
assert c.forces("q", "~(z in u)", forcing_names)

union, table = fl.cohen(3, 4, seed=0)
bits = [row.split()[1] for row in table]
assert len(bits) == 3 and all("." not in b[:4] for b in bits)
assert len(set(bits)) == 3

try:
    fl.canonical("x in")
except ValueError as e:
    assert "column 5" in str(e)
else:
    raise AssertionError("syntax error not raised")

print("smoke test passed")
