use classplit::ingest::{
    parse_cdl, parse_graph_json, parse_input, parse_matrix_csv, write_cdl, write_graph_json,
    write_matrix_csv, IngestError, Input, InputFormat,
};
use classplit_core::{ClassGraphBuilder, MemberId, MemberKind};
use proptest::prelude::*;
use std::path::Path;

fn names() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set("[a-zA-Z_][a-zA-Z0-9_]{0,6}", 1..12).prop_map(|s| {
        s.into_iter()
            // Keywords are reserved.
            .filter(|n| !matches!(n.as_str(), "class" | "method" | "field" | "uses" | "calls"))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_identifiers_round_trip(
        names in names(),
        kinds in prop::collection::vec(any::<bool>(), 12),
        edges in prop::collection::vec((0usize..12, 0usize..12), 0..30),
    ) {
        prop_assume!(!names.is_empty());
        let mut b = ClassGraphBuilder::new("Gen");
        for (i, n) in names.iter().enumerate() {
            b.add_member(n.clone(), if kinds[i] { MemberKind::Method } else { MemberKind::Field });
        }
        for (x, y) in edges {
            let (x, y) = (x % names.len(), y % names.len());
            match (kinds[x], kinds[y]) {
                (true, false) => b.add_use(names[x].clone(), names[y].clone()),
                (true, true) if x != y => b.add_call(names[x].clone(), names[y].clone()),
                _ => {}
            }
        }
        let g = b.build().unwrap();
        prop_assert_eq!(parse_cdl(&write_cdl(&g)).unwrap(), g.clone());
        let json = parse_graph_json(&write_graph_json(&g)).unwrap();
        prop_assert_eq!(json.len(), g.len());
        for id in g.ids() {
            let other = json.id_of(g.name(id)).unwrap();
            prop_assert_eq!(json.kind(other), g.kind(id));
        }
    }
}

#[test]
fn comments_and_layout_are_ignored() {
    let compact = parse_cdl("class C{method m uses x calls n;method n;field x;}").unwrap();
    let spread = parse_cdl(
        "# leading comment\nclass C {\n  method m   # trailing\n    uses x\n    calls n ;\n  method n;\n\n  field x;\n}\n",
    )
    .unwrap();
    assert_eq!(compact, spread);
}

#[test]
fn forward_references_resolve() {
    let g = parse_cdl("class C { method m uses late; field late; }").unwrap();
    assert!(g.references(MemberId(0), MemberId(1)));
}

#[test]
fn cdl_errors_are_positioned() {
    let err = parse_cdl("class C {\n  method m uses nothing;\n}").unwrap_err();
    assert!(matches!(err, IngestError::Model(_)), "{err}");
    let err = parse_cdl("class C {\n  method m uses;\n}").unwrap_err();
    assert!(matches!(err, IngestError::Syntax { line: 2, .. }), "{err}");
    let err = parse_cdl("class C { } trailing").unwrap_err();
    assert!(
        matches!(
            err,
            IngestError::Syntax {
                line: 1,
                col: 13,
                ..
            }
        ),
        "{err}"
    );
    let err = parse_cdl("class C { field x; method x; }").unwrap_err();
    assert!(matches!(err, IngestError::Model(_)), "{err}");
}

#[test]
fn json_rejects_unknown_keys() {
    let err =
        parse_graph_json(r#"{"class": "C", "fields": [], "methods": [], "extra": 1}"#).unwrap_err();
    assert!(matches!(err, IngestError::MalformedDocument(_)), "{err}");
}

#[test]
fn csv_triangles_and_conflicts() {
    let lower = parse_matrix_csv(",a:m,b:f\na:m,1,\nb:f,0.25,1\n").unwrap();
    let upper = parse_matrix_csv(",a:m,b:f\na:m,1,0.25\nb:f,,1\n").unwrap();
    let full = parse_matrix_csv("a:m,b:f\n1,0.25\n0.25,1\n").unwrap();
    assert_eq!(lower, upper);
    assert_eq!(lower, full);
    assert_eq!(parse_matrix_csv(&write_matrix_csv(&lower)).unwrap(), lower);

    assert!(matches!(
        parse_matrix_csv("a:m,b:f\n1,0.25\n0.5,1\n"),
        Err(IngestError::AsymmetricConflict { .. })
    ));
    assert!(matches!(
        parse_matrix_csv("a:m,b:f\n1,\n,1\n"),
        Err(IngestError::MissingValue { .. })
    ));
    assert!(matches!(
        parse_matrix_csv("a:m,b:f\n1,1.5\n1.5,1\n"),
        Err(IngestError::ValueOutOfRange { .. })
    ));
    assert!(parse_matrix_csv("a:m,b:q\n1,0\n0,1\n").is_err());
}

#[test]
fn format_from_extension() {
    assert_eq!(
        InputFormat::from_path(Path::new("x/bank.CDL")),
        Some(InputFormat::Cdl)
    );
    assert_eq!(
        InputFormat::from_path(Path::new("m.csv")),
        Some(InputFormat::Csv)
    );
    assert_eq!(InputFormat::from_path(Path::new("noext")), None);
    let input = parse_input("class C { field x; }", InputFormat::Cdl).unwrap();
    assert!(matches!(input, Input::Graph(g) if g.len() == 1));
}
