use nodal::Complex64;

/// Parses "re+imi" style complex numbers: "1.5", "-2i", "0+1i", "0.1-1.3e-2i", "i".
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| format!("bad complex number `{s}`"));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| format!("bad complex number `{s}`")),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| format!("bad complex number `{s}`"))?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(complex).collect()
}

pub fn complex_triple(s: &str) -> Result<[Complex64; 3], String> {
    let v = complex_list(s)?;
    <[Complex64; 3]>::try_from(v).map_err(|v| format!("expected 3 comma-separated values, got {}", v.len()))
}

pub fn real_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number `{x}`"))).collect()
}
