fn main() {
    let t = std::time::Instant::now();
    for (n, d) in [(1usize, 3u32), (2, 2)] {
        for node in qdc_core::operators::grid_nodes(n) {
            let c = qdc_core::operators::cohomology_dims(n, node.k, node.r, d).unwrap();
            println!("({n}, {}, {}, {d}, {}, {}, {}),", c.k, c.r, c.dim_kernel, c.dim_image, c.dim_cohomology);
        }
    }
    eprintln!("{:?}", t.elapsed());
}
