fn main() {
    let p = std::env::args().nth(1).unwrap();
    let xml = std::fs::read(p).unwrap();
    let units = jniflow::ast::parse_srcml_archive(&xml).unwrap();
    let syms = jniflow::symbols::collect_symbols(&units);
    let map = jniflow::slicer::build_all(&units, &syms);
    print!("{}", map.dump());
}
