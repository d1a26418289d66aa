//! Compiles a C program against the generated header and links it to the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "qfridge.h"

int main(void) {
    QfTrajectory *traj = NULL;
    const char *sets[] = {"grid.horizon=2"};
    if (qf_run_preset("single-qubit-N1", sets, 1, &traj) != QF_STATUS_OK) return 1;
    size_t n = qf_trajectory_len(traj);
    double t, r, temp;
    if (qf_trajectory_sample(traj, n - 1, 0, &t, &r, &temp) != QF_STATUS_OK) return 2;
    qf_trajectory_free(traj);
    if (fabs(temp - qf_analytic_single_qubit_temperature(t, 0.5, 1.0)) > 1e-6) return 3;
    if (qf_run_preset("missing", NULL, 0, &traj) != QF_STATUS_CONFIG) return 4;
    char msg[256];
    if (qf_last_error(msg, sizeof msg) == 0) return 5;
    printf("%zu %.9f\n", n, temp);
    return 0;
}
"#;

fn find_static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().ok()?.parent()?.parent()?.to_path_buf();
    let lib = profile_dir.join("libqfridge.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = find_static_lib() else {
        panic!("static library not found next to the test binary");
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "compile failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "client exited with {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.trim().split(' ').count() == 2, "unexpected output {stdout}");
}
