use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u64 = 1 << 14;

fn ldu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldu")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Second row, named column of a two-line TSV table.
fn field(out: &Output, name: &str) -> String {
    let text = stdout(out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    row[header.iter().position(|h| *h == name).unwrap()].to_string()
}

fn sparse_file(path: &Path, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = vec![0u8; (N / 8) as usize];
    for i in 0..N as usize {
        if rng.gen_bool(0.05) {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
    }
    fs::write(path, &bytes).unwrap();
    bytes
}

fn compressed(dir: &Path) -> (Vec<u8>, String) {
    let raw = dir.join("raw.bin");
    let bytes = sparse_file(&raw, 1);
    let ldc = dir.join("x.ldc");
    let out = ldu(&[
        "compress", "--input", raw.to_str().unwrap(), "--n", &N.to_string(), "--p", "0.05", "--epsilon", "0.1", "--output", ldc.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(field(&out, "failed_blocks"), "0");
    (bytes, ldc.to_str().unwrap().to_string())
}

#[test]
fn compress_decompress_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (bytes, ldc) = compressed(dir.path());
    let back = dir.path().join("back.bin");
    let out = ldu(&["decompress", "--input", &ldc, "--output", back.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(back).unwrap(), bytes);
}

#[test]
fn get_reads_each_bit() {
    let dir = tempfile::tempdir().unwrap();
    let (bytes, ldc) = compressed(dir.path());
    for i in [0u64, 1, 777, N - 1] {
        let out = ldu(&["get", "--file", &ldc, "--index", &i.to_string()]);
        assert!(out.status.success());
        let want = bytes[i as usize / 8] >> (7 - i % 8) & 1;
        assert_eq!(field(&out, "value"), want.to_string());
    }
}

#[test]
fn set_twice_restores_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let (bytes, ldc) = compressed(dir.path());
    let before = fs::read(&ldc).unwrap();
    let i = (0..N).find(|&i| bytes[i as usize / 8] >> (7 - i % 8) & 1 == 0).unwrap();
    assert!(ldu(&["set", "--file", &ldc, "--index", &i.to_string(), "--value", "1"]).status.success());
    assert_eq!(field(&ldu(&["get", "--file", &ldc, "--index", &i.to_string()]), "value"), "1");
    assert!(ldu(&["set", "--file", &ldc, "--index", &i.to_string(), "--value", "0"]).status.success());
    assert_eq!(fs::read(&ldc).unwrap(), before);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (_, ldc) = compressed(dir.path());
    assert_eq!(ldu(&["get", "--file", &ldc, "--index", &N.to_string()]).status.code(), Some(3));
    let junk = dir.path().join("junk.ldc");
    fs::write(&junk, b"not a container").unwrap();
    assert_eq!(ldu(&["get", "--file", junk.to_str().unwrap(), "--index", "0"]).status.code(), Some(6));
    let missing = dir.path().join("missing.ldc");
    assert_eq!(ldu(&["get", "--file", missing.to_str().unwrap(), "--index", "0"]).status.code(), Some(8));
    let raw = dir.path().join("small.bin");
    sparse_file(&raw, 2);
    let out = ldu(&[
        "compress", "--input", raw.to_str().unwrap(), "--n", "1024", "--p", "0.05", "--epsilon", "0.1", "--output", junk.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(7));
    assert_eq!(ldu(&["set", "--file", &ldc, "--index", "0", "--value", "2"]).status.code(), Some(2));
}

#[test]
fn bounds_on_gadget() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("gadget.txt");
    fs::write(&scheme, "n 2\nm 1\nenc 1 1 01\ndec 1 1 01\ndec 2 1 01\n").unwrap();
    let out = ldu(&["bounds", "--scheme", scheme.to_str().unwrap(), "--p", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("9/50"), "{text}");
}
