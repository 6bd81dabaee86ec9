use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(censored_gof_py::censored_gof_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("cg", module).unwrap();
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn sample_and_estimate() {
    run(r#"
s = cg.CensoredSample([3.0, 1.0, 2.0, 0.5], 10)
assert (s.r, s.n, len(s)) == (4, 10, 4)
assert s.values == [0.5, 1.0, 2.0, 3.0]
fam, params = cg.estimate(s, "exp")
assert fam == "exp"
assert abs(params[0] - (6.5 + 6 * 3.0) / 4) < 1e-12
try:
    cg.CensoredSample([1.0], 10)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}

#[test]
fn transforms_and_statistics() {
    run(r#"
u = [0.1, 0.2, 0.35, 0.5]
out = cg.transform_uniforms(u, 4, "ms")
assert all(abs(a - b) < 1e-12 for a, b in zip(out, u))
z = cg.uniform_scores(u, 10, "lhb")
assert len(z) == 4 and abs(sum(z)) < 1e-12
assert cg.statistic([0.0, 1.0, -1.0, 0.5], "W2") > 0
try:
    cg.transform_uniforms(u, 10, "xx")
    raise AssertionError("expected ValueError")
except ValueError as e:
    assert "unknown transform" in str(e)
"#);
}

#[test]
fn gof_with_table_and_direct() {
    run(r#"
x = cg.sample_model("exp(2)", 60, seed=4)
s = cg.CensoredSample.censor(x, 30)
t = cg.CriticalValueTable.simulate(30, statistics="A2,C2", replications=2000, seed=3)
res = cg.gof(s, "exp", transforms="all", statistics="A2,C2", table=t)
assert len(res) == 10
assert res[0].transform == "MS" and res[1].statistic == "C2"
for r in res:
    assert r.reject(0.05) == (r.value > dict(r.critical_values)[0.05])
t2 = cg.CriticalValueTable.from_csv(t.to_csv())
assert t2.critical_value("A2", 30, 0.05) == t.critical_value("A2", 30, 0.05)
a2, w2 = cg.direct(s, "exp")
assert a2 > 0 and w2 > 0
"#);
}
