use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use qheis_cli::cache::{BundleKey, Cache, Lookup};
use qheis_core::codec::Canonical;
use qheis_core::rmatrix::RMatrixBundle;

fn schema(name: &str) -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/");
    let text = std::fs::read_to_string(format!("{path}{name}")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn store_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let key = BundleKey::new(2, 3);
    let b = RMatrixBundle::build(2, 3).unwrap();
    assert!(matches!(cache.load(&key), Lookup::Miss));
    cache.store(&key, &b).unwrap();
    match cache.load(&key) {
        Lookup::Hit(back) => {
            assert_eq!(back, b);
            assert_eq!(back.to_value(), b.to_value());
        }
        other => panic!("{other:?}"),
    }
    let entry: serde_json::Value = serde_json::from_slice(&std::fs::read(cache.path(&key)).unwrap()).unwrap();
    let v = schema("cache.schema.json");
    assert!(v.is_valid(&entry), "{:?}", v.iter_errors(&entry).map(|e| e.to_string()).collect::<Vec<_>>());
}

#[test]
fn version_bump_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let old = BundleKey { tool_version: "0.0.1".into(), ..BundleKey::new(2, 2) };
    cache.store(&old, &RMatrixBundle::build(2, 2).unwrap()).unwrap();
    assert!(matches!(cache.load(&old), Lookup::Hit(_)));
    let new = BundleKey::new(2, 2);
    assert!(matches!(cache.load(&new), Lookup::Miss));
    let (_, hit) = cache.load_or_build(&new, || RMatrixBundle::build(2, 2)).unwrap();
    assert!(!hit);
    assert!(matches!(cache.load(&new), Lookup::Hit(_)));
    assert!(matches!(cache.load(&old), Lookup::Miss));
}

#[test]
fn schema_bump_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let key = BundleKey::new(2, 1);
    cache.store(&key, &RMatrixBundle::build(2, 1).unwrap()).unwrap();
    let path = cache.path(&key);
    let text = std::fs::read_to_string(&path).unwrap().replacen("\"schema_version\":1", "\"schema_version\":99", 1);
    std::fs::write(&path, text).unwrap();
    assert!(matches!(cache.load(&key), Lookup::Miss));
}

#[test]
fn corrupt_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let key = BundleKey::new(3, 2);
    std::fs::write(cache.path(&key), b"{\"schema_version\":1,\"key\":").unwrap();
    assert!(matches!(cache.load(&key), Lookup::Corrupt(_)));
    let (b, hit) = cache.load_or_build(&key, || RMatrixBundle::build(3, 2)).unwrap();
    assert!(!hit);
    assert_eq!(b, RMatrixBundle::build(3, 2).unwrap());
    assert!(matches!(cache.load(&key), Lookup::Hit(_)));

    // well-formed json with a damaged payload
    let text = std::fs::read_to_string(cache.path(&key)).unwrap().replacen("\"dim\":3", "\"dim\":\"x\"", 1);
    std::fs::write(cache.path(&key), text).unwrap();
    assert!(matches!(cache.load(&key), Lookup::Corrupt(_)));
}

#[test]
fn concurrent_readers_never_see_torn_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(Cache::new(dir.path()));
    let key = BundleKey::new(2, 4);
    let b = Arc::new(RMatrixBundle::build(2, 4).unwrap());
    cache.store(&key, &b).unwrap();
    let stop = Arc::new(AtomicBool::new(false));
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let (cache, key, b, stop) = (cache.clone(), key.clone(), b.clone(), stop.clone());
            std::thread::spawn(move || {
                let mut reads = 0;
                while !stop.load(Ordering::Relaxed) || reads < 20 {
                    match cache.load(&key) {
                        Lookup::Hit(got) => assert_eq!(&got, b.as_ref()),
                        other => panic!("torn or missing read: {other:?}"),
                    }
                    reads += 1;
                }
                reads
            })
        })
        .collect();
    for _ in 0..40 {
        cache.store(&key, &b).unwrap();
    }
    stop.store(true, Ordering::Relaxed);
    for r in readers {
        assert!(r.join().unwrap() >= 20);
    }
    // no temporary files left behind
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1, "{names:?}");
}
