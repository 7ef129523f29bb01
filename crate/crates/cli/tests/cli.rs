use serde_json::Value;
use snowflake_cli::{run_with, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use snowflake_core::lattice::{format_rational, parse_rational};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("snowflake").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn collect_strings<'a>(v: &'a Value, acc: &mut Vec<&'a str>) {
    match v {
        Value::String(s) => acc.push(s),
        Value::Array(a) => a.iter().for_each(|x| collect_strings(x, acc)),
        Value::Object(m) => m.values().for_each(|x| collect_strings(x, acc)),
        _ => {}
    }
}

#[test]
fn orbit_7_12_level_1() {
    let v = json(&["orbit", "--level", "1", "--x0", "7/12"]);
    assert_eq!(v["schema"], "snowflake.orbit/v1");
    assert_eq!(v["period"], 6);
    assert_eq!(v["class"]["class"], "Stabilizing");
    assert_eq!(v["status"]["kind"], "periodic");
    assert_eq!(v["initial"]["address"], "51");
    assert_eq!(v["initial"]["position"], "3/4");
    assert_eq!(v["footprint"].as_array().unwrap().len(), 6);
}

#[test]
fn straighten_example() {
    let (code, out, _) = call(&["straighten", "13123232113133100324"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "13123212313131344120\n");
}

#[test]
fn genus_example() {
    assert_eq!(call(&["genus", "--level", "1"]).1, "10\n");
    let v = json(&["genus", "--level", "2", "--format", "json"]);
    assert_eq!(v["genus"], 46);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["orbit", "--nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["orbit", "--budget", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    assert_eq!(call(&["--version"]).0, EXIT_OK);
    // domain errors
    assert_eq!(call(&["orbit", "--x0", "1/3"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["classify", "--x0", "3/2"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["straighten", "1x"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["boundary", "--level", "9"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["boundary", "--level", "2", "--max-level", "1"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["genus", "--format", "svg"]).0, EXIT_USAGE);
}

#[test]
fn rational_strings_round_trip() {
    for args in [
        &["orbit", "--level", "2", "--x0", "1/2"][..],
        &["sequence", "--x0", "5/12", "--n-max", "3"][..],
        &["classify", "--x0", "1/8"][..],
        &["boundary", "--level", "1"][..],
    ] {
        let v = json(args);
        let mut strings = Vec::new();
        collect_strings(&v, &mut strings);
        let mut checked = 0;
        for s in strings {
            if let Ok(r) = parse_rational(s) {
                if s.contains('/') {
                    assert_eq!(format_rational(&r), s);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["orbit", "--level", "3", "--x0", "7/12"][..],
        &["study", "--sample", "M(1),random:4:200", "--n-max", "3", "--seed", "9"][..],
        &["render", "--level", "2", "--x0", "1/2"][..],
        &["probe", "--dir", "1,2", "--level", "1", "--samples", "3", "--seed", "4"][..],
    ] {
        let a = call(args);
        let b = call(args);
        assert_eq!(a.0, EXIT_OK, "{}", a.2);
        assert_eq!(a.1, b.1);
    }
}

#[test]
fn study_csv_columns() {
    let (code, out, _) = call(&["study", "--sample", "1/2,1/4", "--n-max", "3"]);
    assert_eq!(code, EXIT_OK);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, snowflake_cli::emit::STUDY_COLUMNS);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    let half_n3 = rows.iter().find(|r| &r[0] == "1/2" && &r[2] == "3").unwrap();
    assert_eq!(&half_n3[5], "24");
    assert_eq!(&half_n3[7], "14/3");
    assert_eq!(&half_n3[8], "true");
    assert_eq!(&half_n3[9], "true");
}

#[test]
fn study_json_reports_agreement() {
    let v = json(&["study", "--sample", "M(1)", "--n-max", "2", "--format", "json", "--workers", "2"]);
    assert_eq!(v["schema"], "snowflake.study/v1");
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
    assert!(v["agreement"]["PiecewiseFagnano"]["rows"].as_u64().unwrap() > 0);
}

#[test]
fn sequence_stabilizes() {
    let v = json(&["sequence", "--x0", "7/12", "--n-max", "4"]);
    assert_eq!(v["stabilization_index"], 1);
    assert_eq!(v["periods"], serde_json::json!([6, 6, 6, 6, 6]));
    assert_eq!(v["length_limit"], "3/1");
}

#[test]
fn footprint_csv() {
    let (code, out, _) = call(&["footprint", "--level", "1", "--x0", "1/2", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,address,position,dir,direction_a,direction_b");
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("1/2")));
}

#[test]
fn addresses() {
    assert_eq!(call(&["address", "--level", "1", "--side", "2"]).1, "51\n");
    assert_eq!(call(&["address", "--level", "1", "--word", "51"]).1, "2\n");
    let (_, out, _) = call(&["address", "--level", "1"]);
    assert_eq!(out.lines().count(), 12);
    assert_eq!(call(&["address", "--level", "1", "--word", "511"]).0, EXIT_DOMAIN);
}

#[test]
fn probe_closes() {
    let v = json(&["probe", "--dir", "1,2", "--level", "1", "--samples", "4", "--seed", "1"]);
    assert_eq!(v["schema"], "snowflake.probe/v1");
    assert_eq!(v["budget_exceeded"], 0);
    assert_eq!(v["periodic"], 8);
}

#[test]
fn render_pictures() {
    let (_, tri, _) = call(&["render", "--level", "0"]);
    assert!(tri.starts_with("<?xml"));
    assert!(!tri.contains(r#"id="orbit""#));
    let (_, ppf, _) = call(&["render", "--level", "1", "--x0", "1/2"]);
    let path = ppf.lines().find(|l| l.contains(r#"id="orbit""#)).unwrap();
    let d = path.split(" d=\"").nth(1).unwrap();
    assert_eq!(d.matches('M').count() + d.matches('L').count(), 6);
    assert!(d.contains(" Z"));
    assert_eq!(ppf.matches("<circle").count(), 6);
    assert_eq!(ppf.matches("<line").count(), 3);
    let (code, fig, _) = call(&["render", "--level", "1", "--x0", "7/12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fig.matches("<circle").count(), 6);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let (code, out, _) = call(&["boundary", "--level", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["side_count"], 12);
    assert_eq!(v["census"]["4pi/3"], 6);
}

#[test]
fn lattice_direction_orbit() {
    let v = json(&["orbit", "--level", "0", "--x0", "1/2", "--dir", "2,4"]);
    assert_eq!(v["initial"]["direction"]["a"], "1/1");
    assert_eq!(v["initial"]["direction"]["b"], "2/1");
    assert_eq!(v["family"], "lattice");
}
