use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use sparse_forest_ffi::*;

fn grid_data(n: usize, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = (0..d).map(|j| ((i * (j + 3) * 7919) % 1000) as f64 / 1000.0).collect();
        y.push(if row[0] < 0.5 { -1.0 } else { 1.0 });
        x.extend(row);
    }
    (x, y)
}

fn params(policy: SfPolicy) -> SfForestParams {
    SfForestParams { policy: policy as u32, k_n: 8, trees: 20, m_try: 0, target_leaves: 0, seed: 3 }
}

fn last_error() -> String {
    let p = sf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fit_predict_free() {
    let (x, y) = grid_data(300, 3);
    let mut forest = ptr::null_mut();
    let p = params(SfPolicy::PurelyRandom);
    let status = unsafe {
        sf_forest_fit(x.as_ptr(), y.as_ptr(), 300, 3, &p, ptr::null(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::Ok);
    assert!(!forest.is_null());
    unsafe {
        assert_eq!(sf_forest_dimension(forest), 3);
        assert_eq!(sf_forest_tree_count(forest), 20);
        let queries = [0.1, 0.5, 0.5, 0.9, 0.5, 0.5];
        let mut out = [0.0; 2];
        assert_eq!(sf_forest_predict(forest, queries.as_ptr(), 2, 3, out.as_mut_ptr()), SfStatus::Ok);
        assert!(out.iter().all(|v| v.abs() <= 1.0));
        let mut counts = [0u64; 3];
        assert_eq!(sf_forest_split_counts(forest, counts.as_mut_ptr(), 3), SfStatus::Ok);
        assert_eq!(counts.iter().sum::<u64>(), 20 * 7);
        sf_forest_free(forest);
    }
}

#[test]
fn guided_and_cart_regimes() {
    let (x, y) = grid_data(200, 4);
    let (sx, sy) = grid_data(150, 4);
    for policy in [SfPolicy::Guided, SfPolicy::Cart] {
        let mut forest = ptr::null_mut();
        let p = params(policy);
        let status = unsafe {
            sf_forest_fit(x.as_ptr(), y.as_ptr(), 200, 4, &p, ptr::null(), sx.as_ptr(), sy.as_ptr(), 150, &mut forest)
        };
        assert_eq!(status, SfStatus::Ok, "{policy:?}");
        let queries = [0.1, 0.5, 0.5, 0.5, 0.9, 0.5, 0.5, 0.5];
        let mut out = [0.0; 2];
        unsafe {
            assert_eq!(sf_forest_predict(forest, queries.as_ptr(), 2, 4, out.as_mut_ptr()), SfStatus::Ok);
            sf_forest_free(forest);
        }
        // the response is the sign of x1 - 1/2
        assert!(out[0] < -0.5 && out[1] > 0.5, "{policy:?} {out:?}");
    }
}

#[test]
fn error_codes() {
    let (x, y) = grid_data(50, 2);
    let mut forest = ptr::null_mut();
    let mut p = params(SfPolicy::PurelyRandom);
    p.trees = 0;
    let status = unsafe {
        sf_forest_fit(x.as_ptr(), y.as_ptr(), 50, 2, &p, ptr::null(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::Config);
    assert!(forest.is_null());
    assert!(last_error().contains("tree"));

    let status = unsafe {
        sf_forest_fit(x.as_ptr(), y.as_ptr(), 50, 2, ptr::null(), ptr::null(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::NullPointer);

    let mut bad_x = x.clone();
    bad_x[0] = 1.5;
    let p = params(SfPolicy::PurelyRandom);
    let status = unsafe {
        sf_forest_fit(bad_x.as_ptr(), y.as_ptr(), 50, 2, &p, ptr::null(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::Data);

    let mut p = params(SfPolicy::PurelyRandom);
    p.policy = 9;
    let status = unsafe {
        sf_forest_fit(x.as_ptr(), y.as_ptr(), 50, 2, &p, ptr::null(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::Config);

    let p = params(SfPolicy::PurelyRandom);
    let probs = [0.9, 0.1];
    let status = unsafe {
        sf_forest_fit(x.as_ptr(), y.as_ptr(), 50, 2, &p, probs.as_ptr(), ptr::null(), ptr::null(), 0, &mut forest)
    };
    assert_eq!(status, SfStatus::Ok);
    let mut out = [0.0; 1];
    unsafe {
        assert_eq!(sf_forest_predict(forest, [0.5, 0.5, 0.5].as_ptr(), 1, 3, out.as_mut_ptr()), SfStatus::Dimension);
        sf_forest_free(forest);
        sf_forest_free(ptr::null_mut());
        assert_eq!(sf_forest_dimension(ptr::null()), 0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sparse_forest.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in ["sf_forest_fit", "sf_forest_predict", "sf_forest_free", "sf_last_error_message", "SF_STATUS_OK"] {
        assert!(text.contains(symbol), "{symbol} missing from the header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        eprintln!("no C compiler found, skipping the syntax check");
        return;
    };
    assert!(status.success());
}
