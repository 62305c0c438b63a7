//! Reference channels with known code structure, and seeded random
//! generators of channels and algebras for property checks and benchmarks.

use rand::Rng;

use crate::algebra::{AlgebraBasis, Summand};
use crate::channel::{Channel, ChannelError};
use crate::codes::CodeSubspace;
use crate::numerics::{
    block_matrix, diag_real, direct_sum, from_real_rows, identity, kron, matrix_unit, matrix_units, random,
    orthonormal_complement, zeros, ComplexMatrix, Tolerance,
};

type Result<T> = std::result::Result<T, ChannelError>;

/// Two-qubit channel with Kraus operators
/// `α[[I, U], [0, 0]]`, `α[[I, −U], [0, 0]]`, `β[[I, V], [I, V]]`,
/// `β[[−I, V], [I, −V]]`, where `α = √(q/2)` and `β = √(1−q)/2`.
///
/// `span{|00⟩, |01⟩}` is correctable for every `q`.
pub fn two_block_channel(q: f64, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Channel> {
    let i2 = identity(2);
    let z2 = zeros(2, 2);
    let alpha = (q / 2.0).sqrt();
    let beta = (1.0 - q).sqrt() / 2.0;
    let kraus = vec![
        block_matrix(&[vec![i2.clone(), u.clone()], vec![z2.clone(), z2.clone()]]).scale(alpha),
        block_matrix(&[vec![i2.clone(), -u], vec![z2.clone(), z2]]).scale(alpha),
        block_matrix(&[vec![i2.clone(), v.clone()], vec![i2.clone(), v.clone()]]).scale(beta),
        block_matrix(&[vec![-&i2, v.clone()], vec![i2, -v]]).scale(beta),
    ];
    Channel::validate(kraus, &Tolerance::default())
}

/// [`two_block_channel`] with `U = V = I`.
pub fn symmetric_two_block_channel(q: f64) -> Result<Channel> {
    two_block_channel(q, &identity(2), &identity(2))
}

/// Channel on `C² ⊗ H` with `E_1 = q·diag(U, V)` and
/// `E_2 = √(1−q²)·[[0, U], [W, 0]]`; unital for all `q ∈ [0, 1]`.
pub fn block_unitary_channel(q: f64, u: &ComplexMatrix, v: &ComplexMatrix, w: &ComplexMatrix) -> Result<Channel> {
    let d = u.nrows();
    let z = zeros(d, d);
    let e1 = block_matrix(&[vec![u.clone(), z.clone()], vec![z.clone(), v.clone()]]).scale(q);
    let e2 = block_matrix(&[vec![z.clone(), u.clone()], vec![w.clone(), z]]).scale((1.0 - q * q).sqrt());
    Channel::validate(vec![e1, e2], &Tolerance::default())
}

/// Non-unital four-dimensional channel for `q ∈ [0, 1/2]` that leaves
/// `span{|1⟩, |2⟩}` invariant while leaking between `|0⟩` and `|3⟩`.
pub fn corner_leak_channel(q: f64) -> Result<Channel> {
    let alpha = (1.0 - 2.0 * q).sqrt();
    let beta = (q / 2.0).sqrt();
    let e1 = diag_real(&[alpha, 1.0, 1.0, alpha]);
    let e2 = from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
    .scale(beta);
    let e3 = from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, -1.0],
        &[-1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
    .scale(beta);
    Channel::validate(vec![e1, e2, e3], &Tolerance::default())
}

/// The invariant subspace `span{|1⟩, |2⟩}` of [`corner_leak_channel`].
pub fn corner_leak_code() -> CodeSubspace {
    CodeSubspace::from_basis_indices(4, &[1, 2], 1, 2).expect("valid indices")
}

/// Channel on `C³ ⊗ C²` sending the block matrix `(A_ij)` to
/// `diag(0, A_11 + A_22, A_33)`.
pub fn block_shift_channel() -> Result<Channel> {
    let i2 = identity(2);
    let kraus = vec![
        kron(&matrix_unit(3, 1, 0), &i2),
        kron(&matrix_unit(3, 1, 1), &i2),
        kron(&matrix_unit(3, 2, 2), &i2),
    ];
    Channel::validate(kraus, &Tolerance::default())
}

/// The qubit code on block `k` (0-based) of [`block_shift_channel`].
pub fn block_shift_code(k: usize) -> CodeSubspace {
    CodeSubspace::from_basis_indices(6, &[2 * k, 2 * k + 1], 1, 2).expect("valid indices")
}

/// `|±⟩ ⊗ C²` in `C² ⊗ C²`, as an isometry (sign `+1` or `−1`).
pub fn hadamard_pair_code(sign: f64) -> CodeSubspace {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = from_real_rows(&[&[s], &[sign * s]]);
    CodeSubspace::from_isometry(kron(&plus, &identity(2)), 1, 2, &Tolerance::default()).expect("isometry")
}

/// Mixed-unitary channel `Σ_i p_i U_i ρ U_i†` with Haar-random unitaries.
pub fn random_mixed_unitary<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> Channel {
    let weights = random::weights(terms, rng);
    let kraus = weights
        .iter()
        .map(|&p| random::unitary(n, rng).scale(p.sqrt()))
        .collect();
    Channel::validate(kraus, &Tolerance::default()).expect("mixed-unitary channel")
}

/// Mixed-unitary channel whose unitaries share a protected block.
///
/// Every `U_i = W_out ((R_i ⊗ I_B) ⊕ S_i) W_in†` with random `R_i` on `A`,
/// `S_i` on the complement and fixed random `W_in`, `W_out`, so `B` is a
/// unitarily correctable subsystem and the algebras of the channel are
/// non-trivial.
pub fn random_structured_mixed_unitary<R: Rng + ?Sized>(
    n: usize,
    protected: Summand,
    terms: usize,
    rng: &mut R,
) -> Channel {
    let k = protected.size();
    assert!(k <= n, "protected block larger than the space");
    let w_in = random::unitary(n, rng);
    let w_out = random::unitary(n, rng);
    let weights = random::weights(terms, rng);
    let kraus = weights
        .iter()
        .map(|&p| {
            let inner = kron(&random::unitary(protected.dim_a, rng), &identity(protected.dim_b));
            let block = if k < n {
                direct_sum(&[inner, random::unitary(n - k, rng)])
            } else {
                inner
            };
            (&w_out * block * w_in.adjoint()).scale(p.sqrt())
        })
        .collect();
    Channel::validate(kraus, &Tolerance::default()).expect("mixed-unitary channel")
}

/// Channel built from isometric dilations with a planted unitarily
/// correctable subsystem.
///
/// On the code `C ≅ A ⊗ B` the Kraus operators are `U (N_k ⊗ I_B)` for a
/// unital mixed-unitary gauge channel `{N_k}` on `A`; on `C^⊥` they are the
/// Kraus operators of a random Stinespring dilation (random unitaries when
/// `unital`), all followed by one random output unitary. The planted code
/// is returned with the channel. A complement of dimension 1 always gives
/// a unital channel.
pub fn random_planted_ucc_channel<R: Rng + ?Sized>(
    n: usize,
    protected: Summand,
    unital: bool,
    rng: &mut R,
) -> (Channel, CodeSubspace) {
    let k = protected.size();
    assert!(k < n, "planted code must leave a complement");
    let tol = Tolerance::default();
    let embed = random::isometry(n, k, rng);
    let comp = orthonormal_complement(&embed);
    let m = n - k;
    let u_out = random::unitary(n, rng);
    let terms = 3;

    let gauge: Vec<ComplexMatrix> = if protected.dim_a == 1 {
        vec![identity(1); 1]
    } else {
        random::weights(terms, rng)
            .iter()
            .map(|&p| random::unitary(protected.dim_a, rng).scale(p.sqrt()))
            .collect()
    };
    let rest: Vec<ComplexMatrix> = if unital {
        random::weights(terms, rng)
            .iter()
            .map(|&p| random::unitary(m, rng).scale(p.sqrt()))
            .collect()
    } else {
        let dilation = random::isometry(m * terms, m, rng);
        (0..terms).map(|t| dilation.rows(t * m, m).into_owned()).collect()
    };

    let count = gauge.len().max(rest.len());
    let kraus = (0..count)
        .map(|t| {
            let mut op = zeros(n, n);
            if let Some(g) = gauge.get(t) {
                op += &embed * kron(g, &identity(protected.dim_b)) * embed.adjoint();
            }
            if let Some(r) = rest.get(t) {
                op += &comp * r * comp.adjoint();
            }
            &u_out * op
        })
        .collect();
    let channel = Channel::validate(kraus, &tol).expect("dilation channel");
    let code = CodeSubspace::from_isometry(embed, protected.dim_a, protected.dim_b, &tol).expect("isometry");
    (channel, code)
}

/// Channel with a correctable subsystem code of correction rank at most
/// `rank`, and the code.
///
/// On the code the Kraus operators are `E_k = Σ_i Y_i (G_ki ⊗ I_B)` where
/// the `Y_i` map the code onto mutually orthogonal subspaces and the random
/// `G_ki` satisfy `Σ_ki G_ki† G_ki = I_A`. The Stinespring isometry is then
/// completed at random on the complement.
pub fn random_correctable_channel<R: Rng + ?Sized>(
    n: usize,
    protected: Summand,
    rank: usize,
    kraus_count: usize,
    rng: &mut R,
) -> (Channel, CodeSubspace) {
    let (da, db) = (protected.dim_a, protected.dim_b);
    let d = protected.size();
    assert!(rank >= 1 && rank * d <= n, "ranges of the error images must fit");
    let tol = Tolerance::default();
    let embed = random::isometry(n, d, rng);
    let comp = orthonormal_complement(&embed);
    let ranges = random::isometry(n, rank * d, rng);
    let gauge = random::isometry(kraus_count * rank * da, da, rng);

    let mut stacked = zeros(kraus_count * n, d);
    for k in 0..kraus_count {
        let mut on_code = zeros(n, d);
        for i in 0..rank {
            let g = gauge.rows((k * rank + i) * da, da).into_owned();
            on_code += ranges.columns(i * d, d) * kron(&g, &identity(db));
        }
        stacked.rows_mut(k * n, n).copy_from(&on_code);
    }
    let rest = orthonormal_complement(&stacked) * random::isometry(kraus_count * n - d, n - d, rng);
    let kraus = (0..kraus_count)
        .map(|k| stacked.rows(k * n, n) * embed.adjoint() + rest.rows(k * n, n) * comp.adjoint())
        .collect();
    let channel = Channel::validate(kraus, &tol).expect("dilation channel");
    let code = CodeSubspace::from_isometry(embed, da, db, &tol).expect("isometry");
    (channel, code)
}

/// The algebra `W (⊕_k I_{A_k} ⊗ M_{B_k} ⊕ 0_K) W†` for a Haar-random `W`.
pub fn random_block_algebra<R: Rng + ?Sized>(
    summands: &[Summand],
    null_dim: usize,
    rng: &mut R,
) -> (AlgebraBasis, ComplexMatrix) {
    let n = summands.iter().map(Summand::size).sum::<usize>() + null_dim;
    let w = random::unitary(n, rng);
    let mut ops = Vec::new();
    let mut offset = 0;
    for s in summands {
        for unit in matrix_units(s.dim_b) {
            let mut block = zeros(n, n);
            block
                .view_mut((offset, offset), (s.size(), s.size()))
                .copy_from(&kron(&identity(s.dim_a), &unit));
            ops.push(&w * block * w.adjoint());
        }
        offset += s.size();
    }
    (AlgebraBasis::from_span(n, &ops, &Tolerance::default()), w)
}
