use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("generate C header");

    let mut header = Vec::new();
    bindings.write(&mut header);
    let target = crate_dir.join("include").join("unibasis.h");
    // Rewrite only on change so the checked-in header keeps its mtime.
    if fs::read(&target).ok().as_deref() != Some(&header[..]) {
        fs::create_dir_all(target.parent().unwrap()).unwrap();
        fs::write(&target, &header).unwrap();
    }
}
