use std::path::Path;
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cfr.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let header = header();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from cfr.h");
    }
    for ty in [
        "typedef struct CfrProgram CfrProgram;",
        "CFR_STATUS_OK = 0",
        "CFR_OUTCOME_BUDGET_EXHAUSTED = 2",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let dir = env!("CARGO_TARGET_TMPDIR");
    let file = Path::new(dir).join("uses_cfr.c");
    std::fs::write(
        &file,
        r#"#include "cfr.h"
int refine(const char *src) {
    CfrProgram *p = NULL;
    CfrProperties *psi = NULL;
    CfrResidual *r = NULL;
    if (cfr_program_parse(src, &p) != CFR_STATUS_OK) return -1;
    cfr_properties_derive(p, &psi);
    CfrStatus s = cfr_refine(p, psi, "while0", NULL, true, &r);
    size_t n = cfr_residual_version_count(r);
    cfr_residual_free(r);
    cfr_properties_free(psi);
    cfr_program_free(p);
    return s == CFR_STATUS_OK ? (int)n : -1;
}
"#,
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include)
        .arg(&file)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| {
            Command::new(cc)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .ok_or(())
}
