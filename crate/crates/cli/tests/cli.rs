use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam"))
        .args(args)
        .output()
        .expect("run amalgam")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn gadget_files_have_the_right_size_and_group() {
    let dir = tempfile::tempdir().unwrap();
    let g22 = dir.path().join("g22.txt");
    let o = amalgam(&["gadget", "2", "2", "--out", path(&g22)]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&g22).unwrap().contains("size 6"));
    let o = amalgam(&["aut", path(&g22)]);
    assert_eq!(stdout(&o).lines().next(), Some("cyclic order 4"));

    let g31 = dir.path().join("g31.txt");
    assert!(amalgam(&["gadget", "3", "1", "--out", path(&g31)]).status.success());
    assert!(fs::read_to_string(&g31).unwrap().contains("size 6"));
    assert_eq!(stdout(&amalgam(&["aut", path(&g31)])).lines().next(), Some("cyclic order 3"));

    assert_eq!(amalgam(&["gadget", "0", "2"]).status.code(), Some(2));
}

#[test]
fn aut_identifies_catalog_groups() {
    let dir = tempfile::tempdir().unwrap();
    let wheel = dir.path().join("wheel6.txt");
    fs::write(
        &wheel,
        "sig rel lt 2\nsig rel adj 2\nsig fun s\nsize 6\n\
         fun s 0 1\nfun s 1 2\nfun s 2 3\nfun s 3 4\nfun s 4 5\nfun s 5 0\n",
    )
    .unwrap();
    assert_eq!(stdout(&amalgam(&["aut", path(&wheel)])).lines().next(), Some("cyclic order 6"));

    let set = dir.path().join("set3.txt");
    fs::write(&set, "size 3\n").unwrap();
    assert_eq!(stdout(&amalgam(&["aut", path(&set)])).lines().next(), Some("order 6 non-abelian"));

    let broken = dir.path().join("broken.txt");
    fs::write(&broken, "size 2\nrel lt 0 1\n").unwrap();
    assert_eq!(amalgam(&["aut", path(&broken)]).status.code(), Some(2));
}

#[test]
fn limit_certifies_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = amalgam(&["limit", "lo", "20", "2", "--seed", "3", "--out", path(out)]);
        assert!(o.status.success());
        assert!(stdout(&o).contains("certified level 2"));
    }
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
    }
    let o = amalgam(&["certify", path(&a), "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("certified level 2"));

    let o = amalgam(&["limit", "bipartite", "50", "2"]);
    assert!(o.status.success() && stdout(&o).contains("certified level 2"));
    assert_eq!(amalgam(&["limit", "no-such-class", "10", "2"]).status.code(), Some(2));
}

#[test]
fn enum_amalg_and_orbit_complete() {
    let dir = tempfile::tempdir().unwrap();
    let lo = dir.path().join("lo");
    let o = amalgam(&["enum", "lo", "2", "--out", path(&lo)]);
    assert!(stdout(&o).contains("1 types"));
    let z = dir.path().join("z.txt");
    fs::write(&z, "sig rel lt 2\nsize 1\n").unwrap();
    let chain = lo.join("M_000.txt");
    let o = amalgam(&["amalg", "lo", path(&z), path(&chain), path(&chain), "--f", "0", "--g", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("size 3"));

    let d = dir.path().join("d");
    assert!(amalgam(&["enum", "div:lo", "2", "--out", path(&d)]).status.success());
    let o = amalgam(&["orbit-complete", path(&d.join("M_000.txt")), "--group", "S3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("|X^G| = 12"));
}

#[test]
fn verify_exit_codes_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let o = amalgam(&["--jobs", "1", "verify", "groups", "--quick", "--format", "lines", "--out", path(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("suite groups\n"));
    assert!(text.contains("summary pass 5 fail 0 skip 0"));

    let o = amalgam(&["verify", "consumer-product", "--quick", "--max-products", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(amalgam(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(amalgam(&["verify", "groups", "--cap", "9"]).status.code(), Some(2));
}
