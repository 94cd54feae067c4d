use std::path::Path;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("set by cargo");
    let config = cbindgen::Config::from_file(Path::new(&crate_dir).join("cbindgen.toml"))
        .expect("cbindgen.toml parses");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation succeeds");

    let out_dir = std::env::var("OUT_DIR").expect("set by cargo");
    let generated = Path::new(&out_dir).join("chrelax.h");
    bindings.write_to_file(&generated);

    // Keep the committed header in sync, touching it only on real changes so
    // clean rebuilds stay clean.
    let committed = Path::new(&crate_dir).join("include").join("chrelax.h");
    let new = std::fs::read(&generated).expect("generated header is readable");
    let old = std::fs::read(&committed).unwrap_or_default();
    if new != old {
        std::fs::create_dir_all(committed.parent().expect("include/ has a parent"))
            .expect("include/ is creatable");
        std::fs::write(&committed, &new).expect("committed header is writable");
    }
}
