use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{euler_form, twist_matrix, Basis, IntMatrix, KClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidToken {
    Sigma1,
    Sigma1Inv,
    Sigma2,
    Sigma2Inv,
    /// Shifts (n1, n2, n3); the i-th class picks up (-1)^{n_i}.
    Shift([i64; 3]),
}

/// A word read left to right; tokens act on triples from the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<BraidToken>);

impl BraidWord {
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        BraidWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

fn parse_generator(tok: &str) -> Result<Vec<BraidToken>> {
    let bad = || Error::Parse(format!("bad braid token '{tok}'"));
    let (head, exp) = match tok.split_once('^') {
        Some((h, e)) => (h, e.parse::<i64>().map_err(|_| bad())?),
        None => (tok, 1),
    };
    let (fwd, back) = match head {
        "s1" => (BraidToken::Sigma1, BraidToken::Sigma1Inv),
        "s2" => (BraidToken::Sigma2, BraidToken::Sigma2Inv),
        _ => return Err(bad()),
    };
    if exp.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let t = if exp < 0 { back } else { fwd };
    Ok(vec![t; exp.unsigned_abs() as usize])
}

fn parse_shift(body: &str) -> Result<BraidToken> {
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("shift needs three integers: [{body}]")));
    }
    let mut n = [0i64; 3];
    for (k, p) in parts.iter().enumerate() {
        n[k] = p.parse().map_err(|_| Error::Parse(format!("bad shift entry '{p}'")))?;
    }
    Ok(BraidToken::Shift(n))
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let mut rest = s.trim_start();
        while !rest.is_empty() {
            if let Some(after) = rest.strip_prefix('[') {
                let end = after.find(']').ok_or_else(|| Error::Parse("unterminated shift".into()))?;
                out.push(parse_shift(&after[..end])?);
                rest = &after[end + 1..];
            } else {
                let end = rest.find(|c: char| c.is_whitespace() || c == '[').unwrap_or(rest.len());
                out.extend(parse_generator(&rest[..end])?);
                rest = &rest[end..];
            }
            rest = rest.trim_start();
        }
        Ok(BraidWord(out))
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|t| match t {
                BraidToken::Sigma1 => "s1".to_string(),
                BraidToken::Sigma1Inv => "s1^-1".to_string(),
                BraidToken::Sigma2 => "s2".to_string(),
                BraidToken::Sigma2Inv => "s2^-1".to_string(),
                BraidToken::Shift(n) => format!("[{},{},{}]", n[0], n[1], n[2]),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// chi(e_i, e_i) = 1 and chi(e_j, e_i) = 0 for i < j.
pub fn is_class_exceptional(t: &[KClass; 3]) -> Result<bool> {
    for i in 0..3 {
        if euler_form(&t[i], &t[i])? != 1 {
            return Ok(false);
        }
        for j in i + 1..3 {
            if euler_form(&t[j], &t[i])? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn step(t: [KClass; 3], tok: BraidToken) -> Result<[KClass; 3]> {
    let [a, b, c] = t;
    Ok(match tok {
        BraidToken::Sigma1 => [a.combine(euler_form(&a, &b)?, &b)?, a, c],
        BraidToken::Sigma1Inv => [b, b.combine(euler_form(&a, &b)?, &a)?, c],
        BraidToken::Sigma2 => [a, b.combine(euler_form(&b, &c)?, &c)?, b],
        BraidToken::Sigma2Inv => [a, c, c.combine(euler_form(&b, &c)?, &b)?],
        BraidToken::Shift(n) => {
            let sign = |k: i64, x: KClass| if k.rem_euclid(2) == 1 { x.scale(-1) } else { Ok(x) };
            [sign(n[0], a)?, sign(n[1], b)?, sign(n[2], c)?]
        }
    })
}

/// Applies the word to a class-exceptional triple.
pub fn mutate(triple: [KClass; 3], word: &BraidWord) -> Result<[KClass; 3]> {
    if !is_class_exceptional(&triple)? {
        return Err(Error::NotExceptional);
    }
    let b = triple[0].basis;
    let mut t = [triple[0], triple[1].in_basis(b)?, triple[2].in_basis(b)?];
    for &tok in &word.0 {
        t = step(t, tok)?;
    }
    Ok(t)
}

fn delta_block(m: &IntMatrix) -> IntMatrix {
    IntMatrix::from_rows([[m.get(1, 1), m.get(1, 2)], [m.get(2, 1), m.get(2, 2)]])
}

/// Image in SL(2, Z) through the inverse spherical twists restricted to
/// the delta plane; shifts act trivially.
pub fn braid_to_sl2(word: &BraidWord) -> Result<IntMatrix> {
    let t1 = twist_matrix(&[KClass::delta1()], Basis::R)?.matrix;
    let t2 = twist_matrix(&[KClass::delta2()], Basis::R)?.matrix;
    let s1 = delta_block(&t1.inverse()?);
    let s2 = delta_block(&t2.inverse()?);
    let (s1i, s2i) = (delta_block(&t1), delta_block(&t2));
    let mut m = IntMatrix::identity(2);
    for tok in &word.0 {
        let g = match tok {
            BraidToken::Sigma1 => &s1,
            BraidToken::Sigma1Inv => &s1i,
            BraidToken::Sigma2 => &s2,
            BraidToken::Sigma2Inv => &s2i,
            BraidToken::Shift(_) => continue,
        };
        m = m.mul(g)?;
    }
    Ok(m)
}
