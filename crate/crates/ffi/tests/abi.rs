// reference values are kept at the precision they were computed to
#![allow(clippy::excessive_precision)]

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use pulso::*;

fn data(rel: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = pulso_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn lexicon_scoring_and_classification() {
    unsafe {
        let mut lex = ptr::null_mut();
        assert_eq!(
            pulso_lexicon_load(data("lexicon").as_ptr(), &mut lex),
            PulsoStatus::Ok
        );
        let (mut total, mut label, mut sentences) = (0i64, 0i32, 0usize);
        let text = c("Gana Macri. CampañaDeMiedo");
        assert_eq!(
            pulso_analyze_text(lex, text.as_ptr(), &mut total, &mut label, &mut sentences),
            PulsoStatus::Ok
        );
        assert_eq!((total, label, sentences), (0, 0, 2));
        let text = c("Vamos Scioli, gana el futuro");
        pulso_analyze_text(lex, text.as_ptr(), &mut total, &mut label, ptr::null_mut());
        assert_eq!((total, label), (3, 1));
        pulso_lexicon_free(lex);

        let mut cand = PulsoCandidate::None;
        assert_eq!(
            pulso_classify_candidate(c("MACRI y scioli").as_ptr(), &mut cand),
            PulsoStatus::Ok
        );
        assert_eq!(cand, PulsoCandidate::Both);
    }
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    unsafe {
        let mut lex = ptr::null_mut();
        assert_eq!(
            pulso_lexicon_load(c("/nonexistent").as_ptr(), &mut lex),
            PulsoStatus::Io
        );
        assert!(lex.is_null());
        assert!(last_error().contains("/nonexistent"));
        assert_eq!(
            pulso_lexicon_load(ptr::null(), &mut lex),
            PulsoStatus::NullArgument
        );
        assert_eq!(last_error(), "dir is NULL");
        let bad = [0xffu8, 0];
        let mut cand = PulsoCandidate::None;
        assert_eq!(
            pulso_classify_candidate(bad.as_ptr().cast(), &mut cand),
            PulsoStatus::InvalidUtf8
        );
        pulso_lexicon_free(ptr::null_mut());
        pulso_string_free(ptr::null_mut());
    }
}

#[test]
fn location_rules() {
    unsafe {
        let mut rules = ptr::null_mut();
        assert_eq!(
            pulso_rules_load(data("locations.tsv").as_ptr(), &mut rules),
            PulsoStatus::Ok
        );
        let (mut prov, mut country) = (ptr::null_mut(), ptr::null_mut());
        for (raw, want) in [
            ("CABA", ("Capital Federal", "Argentina")),
            ("Narnia", ("Sin Provincia", "Sin País")),
        ] {
            assert_eq!(
                pulso_normalize_location(rules, c(raw).as_ptr(), &mut prov, &mut country),
                PulsoStatus::Ok
            );
            assert_eq!(CStr::from_ptr(prov).to_str().unwrap(), want.0);
            assert_eq!(CStr::from_ptr(country).to_str().unwrap(), want.1);
            pulso_string_free(prov);
            pulso_string_free(country);
        }
        pulso_rules_free(rules);
    }
}

#[test]
fn aggregate_lifecycle() {
    unsafe {
        let a = pulso_aggregate_new();
        let b = pulso_aggregate_new();
        let (ar, salta) = (c("Argentina"), c("Salta"));
        assert_eq!(
            pulso_aggregate_fold(a, ar.as_ptr(), salta.as_ptr(), 0, 1),
            PulsoStatus::Ok
        );
        assert_eq!(
            pulso_aggregate_fold(b, ar.as_ptr(), salta.as_ptr(), 1, 1),
            PulsoStatus::Ok
        );
        assert_eq!(
            pulso_aggregate_fold(b, ar.as_ptr(), salta.as_ptr(), 1, -1),
            PulsoStatus::Ok
        );
        assert_eq!(
            pulso_aggregate_fold(b, ar.as_ptr(), salta.as_ptr(), 9, 1),
            PulsoStatus::InvalidArgument
        );
        assert_eq!(
            pulso_aggregate_fold(b, ar.as_ptr(), salta.as_ptr(), 1, 2),
            PulsoStatus::InvalidArgument
        );

        let mut shares = PulsoShares::default();
        let empty = pulso_aggregate_new();
        assert_eq!(
            pulso_aggregate_national_shares(empty, &mut shares),
            PulsoStatus::Undefined
        );

        assert_eq!(pulso_aggregate_merge(a, b), PulsoStatus::Ok);
        assert_eq!(pulso_aggregate_merge(a, a), PulsoStatus::InvalidArgument);
        assert_eq!(pulso_aggregate_total(a), 3);
        assert_eq!(pulso_aggregate_total(b), 2);
        assert_eq!(pulso_aggregate_total(ptr::null()), 0);
        assert_eq!(
            pulso_aggregate_national_shares(a, &mut shares),
            PulsoStatus::Ok
        );
        assert_eq!(
            (shares.n_macri, shares.n_scioli, shares.pct_macri),
            (1, 1, 50.0)
        );

        let dir = tempfile::tempdir().unwrap();
        let path = c(dir.path().join("agg.csv").to_str().unwrap());
        assert_eq!(pulso_aggregate_write_csv(a, path.as_ptr()), PulsoStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(
            pulso_aggregate_read_csv(path.as_ptr(), &mut back),
            PulsoStatus::Ok
        );
        assert_eq!(pulso_aggregate_total(back), 3);

        for h in [a, b, empty, back] {
            pulso_aggregate_free(h);
        }
    }
}

#[test]
fn fixture_shares_and_correlation() {
    unsafe {
        let mut agg = ptr::null_mut();
        assert_eq!(
            pulso_aggregate_read_csv(data("balotaje2015/aggregate.csv").as_ptr(), &mut agg),
            PulsoStatus::Ok
        );
        let mut shares = PulsoShares::default();
        pulso_aggregate_national_shares(agg, &mut shares);
        assert!((shares.pct_macri - 51.552817539409313281).abs() < 1e-12);
        pulso_aggregate_free(agg);

        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.5];
        let mut r = 0.0;
        assert_eq!(
            pulso_pearson(x.as_ptr(), y.as_ptr(), 4, &mut r),
            PulsoStatus::Ok
        );
        assert!(r > 0.99 && r < 1.0);
        let mut res = PulsoCorrelation::default();
        assert_eq!(
            pulso_correlation_test(x.as_ptr(), x.as_ptr(), 4, &mut res),
            PulsoStatus::Ok
        );
        assert!(res.degenerate && res.p_value == 0.0 && res.n == 4);
        assert_eq!(
            pulso_correlation_test(x.as_ptr(), y.as_ptr(), 2, &mut res),
            PulsoStatus::InvalidArgument
        );
        assert_eq!(
            pulso_pearson(ptr::null(), y.as_ptr(), 4, &mut r),
            PulsoStatus::NullArgument
        );
    }
}

#[test]
fn pipeline_run_and_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    std::fs::write(
        &corpus,
        pulso_core::synth::generate_jsonl(&pulso_core::synth::SynthConfig::new(500, 3)),
    )
    .unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = c(dir.path().join("out").to_str().unwrap());
    unsafe {
        let run = |corpus: &std::path::Path| {
            pulso_run_pipeline(
                c(corpus.to_str().unwrap()).as_ptr(),
                data("lexicon").as_ptr(),
                data("locations.tsv").as_ptr(),
                data("balotaje2015/official.tsv").as_ptr(),
                out.as_ptr(),
                2,
            )
        };
        assert_eq!(run(&corpus), PulsoStatus::Ok);
        assert!(dir.path().join("out/shares.json").is_file());
        assert_eq!(run(&empty), PulsoStatus::EmptyCorpus);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(pulso_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
