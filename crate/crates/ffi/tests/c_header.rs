use std::path::{Path, PathBuf};
use std::process::Command;

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header_and_library() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = profile_dir();
    if !lib_dir.join("libpolyhom_ffi.so").exists() && !lib_dir.join("libpolyhom_ffi.dylib").exists() {
        eprintln!("skipping: shared library not found in {}", lib_dir.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("polyhom_smoke_{}", std::process::id()));
    let compile = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-lpolyhom_ffi", "-lm", "-o"])
        .arg(&out)
        .status();
    match compile {
        Ok(s) => assert!(s.success(), "C compilation failed"),
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    }
    let run = Command::new(&out).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).lines().count(), 2);
}
