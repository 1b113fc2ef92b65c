use std::ffi::CStr;
use std::process::Command;
use std::ptr;
use std::slice;

use surp_ffi::*;

fn sample(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i * 7919 % 1013) as f64 - 506.0) / 506.0).collect()
}

fn last_error() -> String {
    let p = surp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn encode_then_decode_matches_bit_for_bit() {
    let u = sample(2000);
    for (variant, codec) in [
        (SurpVariant::Laplacian, SurpIndexCodec::Raw),
        (SurpVariant::Exponential, SurpIndexCodec::GolombPermuted),
        (SurpVariant::Laplacian, SurpIndexCodec::Unary),
    ] {
        unsafe {
            let mut opts = std::mem::zeroed::<SurpEncodeOptions>();
            assert_eq!(surp_encode_options_default(&mut opts), SurpStatus::Ok);
            opts.variant = variant as u32;
            opts.index_codec = codec as u32;
            opts.stop_kind = SurpStopKind::TargetSparsity as u32;
            opts.stop_value = 0.9;
            opts.seed = 11;

            let mut enc = ptr::null_mut();
            assert_eq!(surp_encode(u.as_ptr(), u.len(), &opts, &mut enc), SurpStatus::Ok);
            let (mut bytes, mut nbytes) = (ptr::null(), 0usize);
            assert_eq!(surp_encoded_bytes(enc, &mut bytes, &mut nbytes), SurpStatus::Ok);
            let (mut rec, mut nrec) = (ptr::null(), 0usize);
            assert_eq!(surp_encoded_reconstruction(enc, &mut rec, &mut nrec), SurpStatus::Ok);
            let (mut iters, mut refreshes) = (0u64, 0u64);
            assert_eq!(surp_encoded_stats(enc, &mut iters, &mut refreshes), SurpStatus::Ok);
            assert!(iters > 0);

            let mut dec = ptr::null_mut();
            assert_eq!(surp_decode(bytes, nbytes, &mut dec), SurpStatus::Ok);
            let (mut vals, mut nvals) = (ptr::null(), 0usize);
            assert_eq!(surp_decoded_values(dec, &mut vals, &mut nvals), SurpStatus::Ok);
            let mut dec_iters = 0u64;
            assert_eq!(surp_decoded_iterations(dec, &mut dec_iters), SurpStatus::Ok);
            assert_eq!(dec_iters, iters);

            let a = slice::from_raw_parts(rec, nrec);
            let b = slice::from_raw_parts(vals, nvals);
            assert_eq!(nrec, u.len());
            assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
            let nonzero = b.iter().filter(|v| **v != 0.0).count();
            assert!(nonzero >= 200);

            surp_decoded_free(dec);
            surp_encoded_free(enc);
        }
    }
}

#[test]
fn null_options_use_defaults() {
    let u = sample(500);
    unsafe {
        let mut enc = ptr::null_mut();
        assert_eq!(surp_encode(u.as_ptr(), u.len(), ptr::null(), &mut enc), SurpStatus::Ok);
        let mut iters = 0;
        surp_encoded_stats(enc, &mut iters, ptr::null_mut());
        assert_eq!(iters, 1000);
        surp_encoded_free(enc);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut dec = ptr::null_mut();
        let junk = b"NOPE....";
        assert_eq!(surp_decode(junk.as_ptr(), junk.len(), &mut dec), SurpStatus::DataError);
        assert!(dec.is_null());
        assert!(last_error().contains("bad magic"), "{}", last_error());

        assert_eq!(surp_decode(ptr::null(), 0, &mut dec), SurpStatus::NullPointer);

        let zeros = [0.0f64; 16];
        let mut enc = ptr::null_mut();
        assert_eq!(
            surp_encode(zeros.as_ptr(), zeros.len(), ptr::null(), &mut enc),
            SurpStatus::InvalidArgument
        );
        assert!(enc.is_null());

        let mut opts = std::mem::zeroed::<SurpEncodeOptions>();
        surp_encode_options_default(&mut opts);
        opts.variant = 9;
        let u = sample(64);
        assert_eq!(surp_encode(u.as_ptr(), u.len(), &opts, &mut enc), SurpStatus::InvalidArgument);
        assert!(last_error().contains("variant"));

        surp_encoded_free(ptr::null_mut());
        surp_decoded_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(surp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/surp.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["surp_encode", "surp_decode", "surp_last_error", "SURP_STATUS_OK", "SurpEncodeOptions"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output()
    else {
        eprintln!("no C compiler found; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
