use std::fs;
use std::process::{Command, Output};

fn extone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extone")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bound_example() {
    let o = extone(&["bound", "--a", "0", "--b", "0", "--m", "2", "--r", "1", "--sup-h", "0", "--ri", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2.0 * 2.0 * 0.9 / (1.0 - 0.81)).abs() < 1e-12);
    assert!(stdout(&o).starts_with("18.947368"));
}

#[test]
fn threshold_example() {
    let o = extone(&["threshold", "--m", "2", "--ell", "0", "--b", "0", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn negative_curvature_flags_parse() {
    let o = extone(&["threshold", "--m", "2", "--b", "-1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2.0 / 1f64.tanh()).abs() < 1e-12);
}

#[test]
fn empty_off_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.off");
    fs::write(&path, "").unwrap();
    let o = extone(&["spectrum", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse"));
}

#[test]
fn missing_file_is_io_error() {
    let o = extone(&["check-mesh", "--input", "/nonexistent/mesh.off"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_errors_name_the_hypothesis() {
    let o = extone(&["bound", "--a", "1", "--b", "1", "--r", "2", "--ri", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("r ≥ π/(2√b)"), "{}", stderr(&o));

    let o = extone(&["bound", "--r", "1", "--ri", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("r_i ∉ (0, r)"));

    let o = extone(&["threshold", "--m", "1", "--ell", "1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("m − ℓ < 1"));

    let o = extone(&["bound", "--a", "1", "--b", "0", "--r", "1", "--ri", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("a > b"));

    let o = extone(&["sweep", "--name", "flat_disk", "--r", "1", "--radii", "0.5,0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("strictly increasing"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = extone(&["bound", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_then_check_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("disk.off");
    let o = extone(&["generate", "--name", "flat_disk", "--resolution", "0.08", "--output", mesh.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = extone(&["check-mesh", "--input", mesh.to_str().unwrap(), "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    assert!(report.contains("obtuse_edges 0"));
    assert!(report.contains("contained true"));

    let out = dir.path().join("spec.csv");
    let o = extone(&["spectrum", "--input", mesh.to_str().unwrap(), "--k", "3", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let lambda: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    // j₀,₁² / 0.99² on the default disk radius.
    assert!((lambda - 5.783185962946785 / 0.9801).abs() < 0.02 * lambda);

    let o = extone(&["spectrum", "--input", mesh.to_str().unwrap(), "--r", "1", "--ri", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["eigenvalues"][0].as_f64().unwrap() > lambda);
}

#[test]
fn contained_check_rejects_small_ball() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("disk.off");
    extone(&["generate", "--name", "flat_disk", "--resolution", "0.1", "--output", mesh.to_str().unwrap()]);
    let o = extone(&["check-mesh", "--input", mesh.to_str().unwrap(), "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_and_barta_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("sweep{run}.{fmt}"));
            let o = extone(&[
                "sweep", "--name", "flat_disk", "--resolution", "0.06", "--r", "1", "--radii", "0.3,0.5,0.7",
                "--format", fmt, "--output", path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            outputs.push(fs::read(&path).unwrap());

            let path = dir.path().join(format!("barta{run}.{fmt}"));
            let o = extone(&[
                "barta", "--name", "flat_disk", "--resolution", "0.06", "--r", "1", "--trials", "30", "--seed", "11",
                "--format", fmt, "--output", path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            outputs.push(fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[2], "sweep {fmt}");
        assert_eq!(outputs[1], outputs[3], "barta {fmt}");
    }
}

#[test]
fn sweep_csv_layout() {
    let o = extone(&["sweep", "--name", "flat_disk", "--resolution", "0.06", "--r", "1", "--radii", "0.5,0.7,0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r_i,bound,tone,free_vertices");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("5.00000000000e-1,2.66666666667e0,"));
    assert!(lines[2].starts_with("7.00000000000e-1,5.49019607843e0,"));
    assert!(lines[3].starts_with("9.00000000000e-1,1.89473684211e1,"));
}

#[test]
fn barta_reports_no_violations() {
    let o = extone(&["barta", "--name", "flat_disk", "--resolution", "0.06", "--r", "1", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["m_matrix_ok"], true);
    assert!(v["radial_bound"].as_f64().unwrap() <= v["lambda1"].as_f64().unwrap());
}

#[test]
fn disconnected_free_set_is_solver_error() {
    // A closed tetrahedron has no boundary, so nothing carries the Dirichlet
    // condition.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tet.off");
    fs::write(
        &path,
        "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n",
    )
    .unwrap();
    let o = extone(&["spectrum", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
