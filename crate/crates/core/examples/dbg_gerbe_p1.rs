fn main() {
    let sf = stacktor::presentations::gerbe_stacky_fan(&[2, 4]).unwrap();
    let twist = stacktor::presentations::TwistSpec::projective(1, &[]);
    let rep = stacktor::stringy::chern_ring_check(&sf, &twist).unwrap();
    println!("gerbe over P1: clean = {}, pairs = {}, triples = {}", rep.clean(), rep.pairs_checked, rep.triples_checked);
    let ch = stacktor::stringy::chern_character(&sf, &twist).unwrap();
    println!("chern: {}x{} bijective = {}", ch.cr_dimension, ch.k_dimension, ch.bijective);
}
