use crate::C64;

#[inline]
pub fn sh(z: C64) -> C64 {
    z.sinh()
}

#[inline]
pub fn ch(z: C64) -> C64 {
    z.cosh()
}

/// `ξ(u) = sh(u + η) sh(u − η)`, the unitarity factor of the fundamental R-matrix.
#[inline]
pub fn xi(u: C64, eta: C64) -> C64 {
    sh(u + eta) * sh(u - eta)
}
