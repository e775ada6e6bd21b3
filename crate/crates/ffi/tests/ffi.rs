use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use xhail_lite_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    xl_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let e = xl_last_error();
    assert!(!e.is_null());
    CStr::from_ptr(e).to_string_lossy().into_owned()
}

const FLIES: &str = "#modeh flies(+bird).\n#modeb penguin(+bird).\n#modeb not penguin(+bird).\n\
    #example flies(a).\n#example flies(b).\n#example flies(c).\n#example not flies(d).\n\
    bird(X) :- penguin(X). bird(a). bird(b). bird(c). penguin(d).\n";

const TOKENS: &str = "s1\t1\tFormer\tNNP\t2:NAME\ns1\t2\tNazi\tNNP\t5:NMOD\ns1\t3\tdeath\tNN\t4:NMOD\n\
    s1\t4\tcamp\tNN\t5:NMOD\ns1\t5\tguard\tNN\t7:SBJ\ns1\t6\tDemjanjuk\tNNP\t5:APPO\n\
    s1\t7\tdead\tVBD\t0:ROOT\ns1\t8\tat\tIN\t7:ADV\ns1\t9\t91\tCD\t8:PMOD\n";
const GOLD: &str = "[ Former Nazi death camp guard Demjanjuk ] [ dead ] [ at 91 ]\n";

#[test]
fn learn_flies_through_handles() {
    unsafe {
        let mut task = ptr::null_mut();
        assert_eq!(xl_task_from_mode_file(c(FLIES).as_ptr(), &mut task), XlStatus::Ok);
        let mut result = ptr::null_mut();
        assert_eq!(xl_learn(task, 0, 10.0, &mut result), XlStatus::Ok);
        assert!(xl_learn_result_optimal(result));
        let mut s = ptr::null_mut();
        assert_eq!(xl_learn_result_hypothesis(result, &mut s), XlStatus::Ok);
        assert_eq!(take(s), "flies(V1) :- bird(V1), not penguin(V1).\n");
        assert_eq!(xl_learn_result_report_json(result, &mut s), XlStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["so"], 0.0);
        xl_learn_result_free(result);
        xl_task_free(task);
    }
}

#[test]
fn corpus_task_predict_and_score() {
    unsafe {
        let mut task = ptr::null_mut();
        assert_eq!(xl_task_from_corpus(c(TOKENS).as_ptr(), c(GOLD).as_ptr(), &mut task), XlStatus::Ok);
        let mut result = ptr::null_mut();
        assert_eq!(xl_learn(task, 0, 10.0, &mut result), XlStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(xl_learn_result_hypothesis(result, &mut h), XlStatus::Ok);
        let h = c(&take(h));

        let mut program = ptr::null_mut();
        assert_eq!(xl_program_parse(h.as_ptr(), &mut program), XlStatus::Ok);
        let mut lines = ptr::null_mut();
        assert_eq!(xl_predict(program, c(TOKENS).as_ptr(), &mut lines), XlStatus::Ok);
        let lines = take(lines);
        assert_eq!(lines, GOLD);

        let mut sc = XlScore::default();
        assert_eq!(xl_score(c(&lines).as_ptr(), c(GOLD).as_ptr(), c(TOKENS).as_ptr(), &mut sc), XlStatus::Ok);
        assert_eq!(sc, XlScore { precision: 1.0, recall: 1.0, f1: 1.0 });
        xl_program_free(program);
        xl_learn_result_free(result);
        xl_task_free(task);
    }
}

#[test]
fn evaluate_program() {
    unsafe {
        let mut p = ptr::null_mut();
        let text = c("edge(1,2). edge(2,3). path(X,Y) :- edge(X,Y). path(X,Z) :- path(X,Y), edge(Y,Z).");
        assert_eq!(xl_program_parse(text.as_ptr(), &mut p), XlStatus::Ok);
        assert_eq!(xl_program_len(p), 4);
        let mut m = ptr::null_mut();
        assert_eq!(xl_program_evaluate(p, &mut m), XlStatus::Ok);
        let model = take(m);
        assert!(model.contains("path(1,3)."), "{model}");
        xl_program_free(p);
    }
}

#[test]
fn errors_become_status_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(xl_program_parse(c("p(X :- q.").as_ptr(), &mut p), XlStatus::Syntax);
        assert!(p.is_null());
        assert!(last_error().contains("syntax error"));

        assert_eq!(xl_program_parse(c("p(X) :- not q(X).").as_ptr(), &mut p), XlStatus::Unsafe);
        assert_eq!(xl_program_parse(ptr::null(), &mut p), XlStatus::NullArgument);
        assert_eq!(xl_program_parse(c("p.").as_ptr(), ptr::null_mut()), XlStatus::NullArgument);
        let bad_utf8 = [0xffu8, 0];
        assert_eq!(xl_program_parse(bad_utf8.as_ptr().cast(), &mut p), XlStatus::InvalidUtf8);

        assert_eq!(xl_program_parse(c("p :- not q. q :- not p.").as_ptr(), &mut p), XlStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(xl_program_evaluate(p, &mut m), XlStatus::NotStratified);
        assert!(m.is_null());
        xl_program_free(p);

        let mut task = ptr::null_mut();
        assert_eq!(xl_task_from_corpus(c(TOKENS).as_ptr(), c("[ Former ]\n").as_ptr(), &mut task), XlStatus::Corpus);
        assert_eq!(xl_task_from_mode_file(c(FLIES).as_ptr(), &mut task), XlStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(xl_learn(task, 0, -1.0, &mut r), XlStatus::InvalidArgument);
        xl_task_free(task);

        // a successful call clears the message
        assert_eq!(xl_program_parse(c("p.").as_ptr(), &mut p), XlStatus::Ok);
        assert!(xl_last_error().is_null());
        xl_program_free(p);
        xl_string_free(ptr::null_mut());
    }
}

#[test]
fn t_test_through_the_abi() {
    let a = [0.02, 0.01, 0.03, 0.02, 0.02];
    let b = [0.0; 5];
    let mut t = XlTTest::default();
    unsafe {
        assert_eq!(xl_paired_t_test(a.as_ptr(), b.as_ptr(), 5, &mut t), XlStatus::Ok);
        assert!((t.t - 6.324555320336759).abs() < 1e-9);
        assert!((t.p - 0.0015991010761676528).abs() < 1e-9);
        assert_eq!(t.df, 4);
        assert_eq!(xl_paired_t_test(a.as_ptr(), a.as_ptr(), 5, &mut t), XlStatus::Ok);
        assert_eq!((t.t, t.p), (0.0, 0.5));
        assert_eq!(xl_paired_t_test(a.as_ptr(), b.as_ptr(), 1, &mut t), XlStatus::InvalidArgument);
        let v = CStr::from_ptr(xl_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

/// Compiles a C client against the generated header and the static
/// library, then runs it. Skipped when no C compiler is on PATH.
#[test]
fn c_client_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libxhail_lite_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("client");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c_client.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, "flies(V1) :- bird(V1), not penguin(V1).\nt=6.324555 df=4\n");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
