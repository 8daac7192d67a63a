use embedprobe::dump::{DumpHeader, DumpReader, DumpWriter, SentenceRecord};
use embedprobe::store::{read_word2vec_text, write_word2vec_text, LoadOptions};
use embedprobe::synthetic::{random_dump, random_f32};
use embedprobe::{EmbeddingMatrix, Scalar, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHABET: &[char] = &['a', 'z', 'á', 'ő', 'ű', 'Ж', '語', '-', '\'', '0', '9', 'é'];

fn random_word(rng: &mut impl Rng) -> String {
    (0..rng.random_range(1..8))
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())])
        .collect()
}

fn random_matrix<T: Scalar>(rng: &mut impl Rng, value: impl Fn(&mut dyn rand::RngCore) -> T) -> EmbeddingMatrix<T> {
    let mut vocab = Vocabulary::new();
    let n = rng.random_range(1..40);
    while vocab.len() < n {
        let w = random_word(rng);
        if !vocab.contains(&w) {
            vocab.push(w).unwrap();
        }
    }
    let dim = rng.random_range(1..12);
    let values = (0..n * dim).map(|_| value(rng)).collect();
    EmbeddingMatrix::new(vocab, dim, values).unwrap()
}

fn to_bytes<T: Scalar>(m: &EmbeddingMatrix<T>) -> Vec<u8> {
    let mut out = Vec::new();
    write_word2vec_text(m, &mut out).unwrap();
    out
}

fn check_word2vec<T: Scalar>(m: &EmbeddingMatrix<T>, bits: impl Fn(T) -> u64) {
    let first = to_bytes(m);
    let back: EmbeddingMatrix<T> = read_word2vec_text(first.as_slice(), LoadOptions::default()).unwrap();
    assert_eq!(back.vocab(), m.vocab());
    for (x, y) in back.values().iter().zip(m.values()) {
        assert_eq!(bits(*x), bits(*y), "{x} vs {y}");
    }
    assert_eq!(to_bytes(&back), first);
}

#[test]
fn word2vec_round_trip_f32() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let m = random_matrix::<f32>(&mut rng, |r| random_f32(r));
        check_word2vec(&m, |x| x.to_bits() as u64);
    }
}

#[test]
fn word2vec_round_trip_f64() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let m = random_matrix::<f64>(&mut rng, |r| {
            let mant: f64 = r.random_range(-2.0..2.0);
            mant * 2f64.powi(r.random_range(-200..200))
        });
        check_word2vec(&m, f64::to_bits);
    }
}

fn dump_bytes(header: &DumpHeader, records: &[SentenceRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut w = DumpWriter::new(&mut out, header).unwrap();
    for r in records {
        w.write_record(r).unwrap();
    }
    w.finish().unwrap();
    out
}

fn same_record(a: &SentenceRecord, b: &SentenceRecord) {
    assert_eq!(a.words(), b.words());
    assert_eq!(a.alignment(), b.alignment());
    assert_eq!(a.dim(), b.dim());
    let bits = |r: &SentenceRecord| r.vectors().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(a), bits(b));
}

#[test]
fn dump_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(0..20);
        let dim = rng.random_range(1..9);
        let d = random_dump(n, dim, 50, &mut rng);
        let first = dump_bytes(&d.header, &d.records);
        let reader = DumpReader::new(first.as_slice()).unwrap();
        assert_eq!(reader.header(), &d.header);
        let back: Vec<SentenceRecord> = reader.collect::<Result<_, _>>().unwrap();
        assert_eq!(back.len(), d.records.len());
        for (a, b) in back.iter().zip(&d.records) {
            same_record(a, b);
        }
        assert_eq!(dump_bytes(&d.header, &back), first);
    }
}

#[test]
fn dump_preserves_order_over_many_records() {
    let dim = 3;
    let records: Vec<SentenceRecord> = (0..10_000)
        .map(|i| {
            let v = i as f32;
            SentenceRecord::new(vec![format!("s{i}")], dim, vec![v, -v, 0.5 * v], vec![vec![0]]).unwrap()
        })
        .collect();
    let mut header = DumpHeader::new(dim, "order", "last");
    header.sentences = Some(10_000);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("order.dump");
    embedprobe::dump::write_dump(&header, &records, &path).unwrap();
    let back: Vec<SentenceRecord> = embedprobe::dump::read_dump(&path)
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back.len(), 10_000);
    for (i, r) in back.iter().enumerate() {
        assert_eq!(r.words()[0], format!("s{i}"));
        assert_eq!(r.subword(0)[0], i as f32);
    }
}

#[test]
fn vectors_survive_special_bit_patterns() {
    let header = DumpHeader::new(4, "t", "l");
    let vals = [-0.0f32, f32::MIN_POSITIVE / 8.0, f32::MAX, -f32::MIN_POSITIVE];
    let rec = SentenceRecord::new(vec!["x".into()], 4, vals.to_vec(), vec![vec![0]]).unwrap();
    let bytes = dump_bytes(&header, std::slice::from_ref(&rec));
    let back = DumpReader::new(bytes.as_slice()).unwrap().next().unwrap().unwrap();
    same_record(&back, &rec);
}
