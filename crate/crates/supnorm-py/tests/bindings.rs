use pyo3::prelude::*;
use pyo3::types::PyDict;
use supnorm_py::supnorm_py;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        pyo3::append_to_inittab!(supnorm_py);
        Python::initialize();
    });
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("sp", py.import("supnorm_py").unwrap()).unwrap();
        f(py, &globals);
    });
}

fn eval<'py>(py: Python<'py>, g: &Bound<'py, PyDict>, code: &str) -> Bound<'py, PyAny> {
    let code = std::ffi::CString::new(code).unwrap();
    py.eval(&code, Some(g), None).unwrap()
}

#[test]
fn functions_round_trip() {
    with_module(|py, g| {
        let v: f64 = eval(py, g, "sp.bessel_k_scaled(0.0, 1.0)").extract().unwrap();
        assert!((v - 0.421_024_438_240_708_3).abs() < 1e-10);
        let f: (i64, i64) = eval(py, g, "sp.theorem_exponents()[1]").extract().unwrap();
        assert_eq!(f, (5, 24));
        let l: (u32, i64, u32) = eval(py, g, "sp.gtlv_invariants(1, 0, 1, 1, 3, 1)").extract().unwrap();
        assert_eq!(l, (2, -2, 4));
    });
}

#[test]
fn classes_and_errors() {
    with_module(|py, g| {
        let d: f64 = eval(py, g, "sp.WeightModule(100.0).localisation_defect('sharp', 'C')").extract().unwrap();
        assert!(d > 0.0 && d <= 20.0);
        let n: usize = eval(py, g, "sp.PrincipalModel(3, 1).num_cosets()").extract().unwrap();
        assert_eq!(n, 12);
        let code = std::ffi::CString::new("sp.bessel_k_scaled(70.0, 1.0)").unwrap();
        let e = py.eval(&code, Some(g), None).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}
