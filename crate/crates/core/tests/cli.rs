use std::path::PathBuf;
use std::process::{Command, Output};

fn clubval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clubval"))
        .args(args)
        .env_remove("VALUATE_FX_RATE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("clubval-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn apply_bundled_text() {
    let o = clubval(&["apply", "--bundled", "jleague"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Urawa Reds"));
    assert!(text.contains("161.39"));
    assert!(text.contains("Average"));
    assert!(text.contains("Median"));
}

#[test]
fn apply_csv_is_machine_readable() {
    let o = clubval(&["apply", "--bundled", "jleague", "--format", "csv", "--league", "J1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header[0], "league");
    assert!(header.contains(&"fv1_meur".to_string()));
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert!(rows.iter().filter(|r| &r[0] == "J1").count() >= 18);
    assert!(rows.iter().all(|r| !r.iter().any(|c| c.ends_with('%'))));
}

#[test]
fn fit_and_select_from_csv() {
    let dir = scratch("fit");
    let path = dir.join("data.csv");
    let mut body = String::from("club,sns_followers,revenue,value\n");
    for i in 1..=30 {
        let sns = 50_000 * i + 7_919 * (i % 7);
        let rev = 5.0 + 1.7 * i as f64 + ((i * 13) % 5) as f64;
        let value = 3.5 * sns as f64 / 1e6 + 2.5 * rev + ((i * 7) % 3) as f64 - 1.0;
        body.push_str(&format!("C{i},{sns},{rev},{value}\n"));
    }
    std::fs::write(&path, body).unwrap();
    let p = path.to_str().unwrap();

    let o = clubval(&["fit", "--input", p, "--response", "value", "--predictors", "sns_followers_m,revenue"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("sns_followers_m") && text.contains("revenue"));

    let o = clubval(&["select", "--input", p, "--response", "value", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains('|'));

    let o = clubval(&["fit", "--input", p, "--response", "value", "--predictors", "club"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn premiums_and_env_rate() {
    let o = clubval(&["premiums"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Formula 1 premium range: 304.") || text.contains("Formula 1 premium range: 303."), "{text}");
    assert!(text.contains("Sagan Tosu"));

    let o = Command::new(env!("CARGO_BIN_EXE_clubval"))
        .args(["premiums"])
        .env("VALUATE_FX_RATE", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_writes_svg_file() {
    let dir = scratch("plot");
    let out = dir.join("fig.svg");
    let o = clubval(&["plot", "--dataset", "jleague", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let svg = std::fs::read_to_string(&out).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let markers = doc.descendants().filter(|n| n.attribute("class") == Some("marker")).count();
    assert_eq!(markers, 60);

    let linear = stdout(&clubval(&["plot", "--dataset", "europe", "--scale", "linear", "--no-guide"]));
    roxmltree::Document::parse(&linear).unwrap();
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(clubval(&["--version"]).status.code(), Some(0));
    assert_eq!(clubval(&["apply", "--bundled", "nowhere"]).status.code(), Some(2));
    assert_eq!(clubval(&["apply", "--input", "/nonexistent/clubs.csv"]).status.code(), Some(1));
    assert_eq!(clubval(&["apply", "--bundled", "jleague", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(clubval(&["plot", "--format", "md"]).status.code(), Some(2));
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = scratch("nofile");
    let out = dir.join("never.txt");
    let o = clubval(&["apply", "--input", "/nonexistent/clubs.csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    std::fs::remove_dir_all(dir).unwrap();
}
