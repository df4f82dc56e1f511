//! The bundled bank graph against the reference similarity matrix.
//!
//! No property-set graph reproduces every reference cell. PermAddr and
//! CommnAddr (V7, V8) at 0.6 with each other and 0.5 with CustId (V6) force
//! the three fields to share one user set, yet the reference row for
//! displayAddr (M8) gives 0.33 against V6 and 0.4 against V7, and CustName
//! (V1) gives 0.1 against V6 and 0 against V7. The fixture is built to the
//! reference clustering and merge arithmetic instead; the cells it misses are
//! pinned here.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use classplit::ingest::{parse_cdl, parse_matrix_csv};
use classplit_core::similarity::similarity_matrix;
use classplit_core::MemberId;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

/// Property sets counted by hand from the fixture: each method with the
/// fields it uses and methods it calls, each field with the methods using it.
fn oracle_matrix() -> Vec<Vec<f64>> {
    let methods: [(&str, &[&str], &[&str]); 11] = [
        (
            "open",
            &["CustName", "AcNo", "AcType", "Amount", "Balance"],
            &[],
        ),
        (
            "deposit",
            &["CustName", "AcNo", "Amount", "Balance"],
            &["display"],
        ),
        (
            "withdraw",
            &["CustName", "AcNo", "Amount", "Balance"],
            &["display"],
        ),
        ("display", &["CustName", "AcNo", "Balance"], &[]),
        ("close", &["CustName", "AcNo"], &["open"]),
        (
            "addCust",
            &["CustName", "CustId", "PermAddr", "CommnAddr"],
            &[],
        ),
        ("updateAddr", &["CustId", "PermAddr", "CommnAddr"], &[]),
        ("displayAddr", &["CustId", "PermAddr", "CommnAddr"], &[]),
        (
            "apprLoan",
            &["CustName", "LoanNo", "LoanType", "LoanAmnt"],
            &[],
        ),
        ("repay", &["LoanNo", "LoanType", "LoanAmnt"], &[]),
        ("closeloan", &["LoanNo", "LoanType", "LoanAmnt"], &[]),
    ];
    let fields = [
        "CustName",
        "AcNo",
        "AcType",
        "Amount",
        "Balance",
        "CustId",
        "PermAddr",
        "CommnAddr",
        "LoanNo",
        "LoanType",
        "LoanAmnt",
    ];
    let mut sets: Vec<BTreeSet<&str>> = Vec::new();
    for (name, uses, calls) in methods {
        let mut s: BTreeSet<&str> = [name].into();
        s.extend(uses);
        s.extend(calls);
        sets.push(s);
    }
    for f in fields {
        let mut s: BTreeSet<&str> = [f].into();
        s.extend(methods.iter().filter(|m| m.1.contains(&f)).map(|m| m.0));
        sets.push(s);
    }
    sets.iter()
        .map(|a| {
            sets.iter()
                .map(|b| a.intersection(b).count() as f64 / a.union(b).count() as f64)
                .collect()
        })
        .collect()
}

#[test]
fn fixture_matrix_matches_counting_oracle() {
    let graph = parse_cdl(&fixture("bank.cdl")).unwrap();
    let matrix = similarity_matrix(&graph).unwrap();
    let oracle = oracle_matrix();
    for (i, row) in oracle.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            assert_eq!(
                matrix.get(MemberId(i), MemberId(j)),
                want,
                "cell ({i}, {j})"
            );
        }
    }
}

#[test]
fn fixture_matrix_against_reference_matrix() {
    let graph = parse_cdl(&fixture("bank.cdl")).unwrap();
    let ours = similarity_matrix(&graph).unwrap();
    let reference = parse_matrix_csv(&fixture("bank_matrix.csv")).unwrap();
    let mut misses = BTreeMap::new();
    for i in 0..22 {
        for j in (i + 1)..22 {
            let (a, b) = (MemberId(i), MemberId(j));
            let diff = (ours.get(a, b) - reference.get(a, b)).abs();
            // Inclusive: 0.125 is printed as .13.
            if diff > 0.005 + 1e-9 {
                let key = format!("{}-{}", reference.label(a).name, reference.label(b).name);
                misses.insert(key, (reference.get(a, b), ours.get(a, b)));
            }
        }
    }
    let expected = [
        "M2-M3", "M3-M5", "M5-V3", "M8-V7", "V1-V10", "V1-V11", "V1-V6", "V1-V7", "V1-V8", "V1-V9",
    ];
    let got: Vec<&str> = misses.keys().map(String::as_str).collect();
    assert_eq!(got, expected, "{misses:?}");
    // 221 of the 231 off-diagonal cells agree within 0.005.
    assert_eq!(231 - misses.len(), 221);
}
