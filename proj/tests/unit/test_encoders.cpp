#include "doctest.h"

#include <set>

#include "support/oracles.hpp"
#include "tnqe/canonical.hpp"
#include "tnqe/encoders.hpp"
#include "tnqe/error.hpp"

using namespace tnqe;
using tnqe::oracle::Rng;

namespace {

QttCores image_cores(const Image& img, std::size_t rank) { return tt_svd(quantize_image(img), rank).cores; }

Image roundtrip(const Encoding& e) { return decode(simulate(e.circuit), e.layout); }

std::vector<BlockParams> random_blocks(int levels, int nb, int layers, Rng& rng, double spread = 3.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<BlockParams> out;
    for (int k = 0; k < levels; ++k) {
        BlockParams b(nb, layers);
        for (double& a : b.angles()) a = u(rng);
        out.push_back(std::move(b));
    }
    return out;
}

// X[p_1..p_L] = <0| prod_k U_k[(p_k) R + ., .] |0> on the bond index,
// evaluated column by column with dense block matrices.
std::vector<cplx> column_chain(const std::vector<BlockParams>& blocks) {
    const int nb = blocks.front().bond_qubits();
    const auto bond = Eigen::Index{1} << nb;
    std::vector<CMatrix> us;
    for (const auto& b : blocks) us.push_back(oracle::circuit_matrix(block_fragment(b)));
    const std::size_t levels = blocks.size();
    std::vector<cplx> out(std::size_t{1} << (2 * levels));
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(bond);
        v(0) = 1.0;
        for (std::size_t k = 0; k < levels; ++k) {
            const auto p = static_cast<Eigen::Index>((idx >> (2 * (levels - 1 - k))) & 3);
            v = us[k].block(p * bond, 0, bond, bond) * v;
        }
        out[idx] = v(0);
    }
    return out;
}

} // namespace

TEST_CASE("method names round trip") {
    for (Method m : {Method::Amplitude, Method::Full, Method::Core, Method::Unitary})
        CHECK(method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(method_from_string("basis"), InvalidInput);
}

TEST_CASE("amplitude encoding round trip") {
    Rng rng(5);
    const Image img = oracle::random_image(4, rng);
    const Encoding e = encode_amplitude(img);
    CHECK(e.circuit.qubits() == 4);
    CHECK(e.layout.qubit_count() == 4);
    CHECK(oracle::max_abs(roundtrip(e), img) <= 1e-10);
    CHECK(encode_amplitude(oracle::random_image(32, rng)).circuit.qubits() == 10);
    CHECK_THROWS_AS(encode_amplitude(Image::zeros(4)), InvalidInput);
}

TEST_CASE("full encoding reproduces the contraction") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t size = trial % 2 ? 16 : 8;
        const QttCores cores = image_cores(oracle::random_image(size, rng), 1 + trial % 4);
        const Encoding e = encode_full(cores);
        CHECK(oracle::max_abs(roundtrip(e), contract(cores)) <= 1e-8);
        const Encoding opaque = encode_full(cores, {.synthesize = false});
        CHECK(oracle::max_abs(roundtrip(opaque), contract(cores)) <= 1e-8);
        CHECK(counts(opaque.circuit).opaque == static_cast<std::size_t>(cores.levels()));
    }
}

TEST_CASE("full encoding leaves the bond register in |0>") {
    Rng rng(8);
    const QttCores cores = image_cores(oracle::random_image(16, rng), 4);
    const Encoding e = encode_full(cores);
    const StateVector s = simulate(e.circuit);
    const std::size_t phys = std::size_t{1} << 8;
    double outside = 0.0;
    for (std::size_t i = phys; i < s.dimension(); ++i) outside += std::norm(s.amplitudes()[i]);
    CHECK(outside <= 1e-8);
    CHECK(e.layout.registers.front().name == "bond");
    CHECK(e.layout.registers.front().qubits.size() == 2);
}

TEST_CASE("full encoding qubit counts") {
    Rng rng(9);
    const Image img = oracle::random_image(32, rng);
    CHECK(encode_full(image_cores(img, 4), {.synthesize = false}).circuit.qubits() == 12);
    CHECK(encode_full(image_cores(img, 8), {.synthesize = false}).circuit.qubits() == 13);
    for (std::size_t s : {8, 16, 32, 64})
        for (std::size_t r : {1, 2, 4, 8}) {
            const int levels = log2_exact(s);
            // the middle bond of an L-level QTT is at most 4^floor(L/2)
            if (r > (std::size_t{1} << (2 * (levels / 2)))) continue;
            const Encoding e = encode_full(image_cores(oracle::random_image(s, rng), r), {.synthesize = false});
            CHECK(e.circuit.qubits() == 2 * levels + log2_exact(r));
        }
    CHECK_THROWS_AS(encode_full(image_cores(Image::zeros(8), 2)), InvalidInput);
}

TEST_CASE("core-wise encoding registers") {
    Rng rng(10);
    const Image img = oracle::random_image(32, rng);
    const auto sizes = [](const Encoding& e) {
        std::vector<std::size_t> out;
        for (const auto& r : e.layout.registers) out.push_back(r.qubits.size());
        return out;
    };
    const Encoding r4 = encode_core(image_cores(img, 4));
    CHECK(sizes(r4) == std::vector<std::size_t>{4, 6, 6, 6, 4});
    CHECK(r4.circuit.qubits() == 26);
    CHECK(encode_core(image_cores(img, 1)).circuit.qubits() == 10);
    const Encoding r3 = encode_core(image_cores(img, 3));
    CHECK(sizes(r3) == std::vector<std::size_t>{4, 6, 6, 6, 4});

    for (std::size_t s : {8, 16, 32, 64})
        for (std::size_t r : {1, 2, 4, 8}) {
            const QttCores cores = image_cores(oracle::random_image(s, rng), r);
            int want = 0;
            for (const auto& c : cores.cores) want += ceil_log2(4 * c.left * c.right);
            CHECK(encode_core(cores).circuit.qubits() == want);
        }
}

TEST_CASE("core-wise encoding is a product of registers") {
    Rng rng(11);
    const QttCores cores = image_cores(oracle::random_image(16, rng), 3);
    const Encoding e = encode_core(cores);
    std::vector<int> owner(static_cast<std::size_t>(e.circuit.qubits()));
    for (std::size_t k = 0; k < e.layout.registers.size(); ++k)
        for (int q : e.layout.registers[k].qubits) owner[static_cast<std::size_t>(q)] = static_cast<int>(k);
    for (const Gate& g : e.circuit.gates()) {
        std::set<int> regs;
        for (int q : gate_qubits(g)) regs.insert(owner[static_cast<std::size_t>(q)]);
        CHECK(regs.size() == 1);
    }

    std::vector<cplx> product{1.0};
    for (std::size_t k = 0; k < cores.cores.size(); ++k) {
        const QttCore& c = cores.cores[k];
        std::vector<cplx> v(std::size_t{1} << e.layout.registers[k].qubits.size(), 0.0);
        for (std::size_t i = 0; i < c.data.size(); ++i) v[i] = c.data[i] / e.layout.core_norms[k];
        product = oracle::kron(product, v);
    }
    const StateVector s = simulate(e.circuit);
    CHECK(oracle::fidelity(s.amplitudes(), product) >= 1 - 1e-12);
}

TEST_CASE("core-wise decode reproduces the contraction") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const QttCores cores = image_cores(oracle::random_image(trial % 2 ? 16 : 8, rng), 1 + trial % 4);
        CHECK(oracle::max_abs(roundtrip(encode_core(cores)), contract(cores)) <= 1e-8);
    }
    QttCores zero = image_cores(oracle::random_image(8, rng), 2);
    for (auto& v : zero.cores[1].data) v = 0.0;
    CHECK_THROWS_AS(encode_core(zero), InvalidInput);
}

TEST_CASE("block parameters and entangler") {
    BlockParams b(3, 4);
    CHECK(b.arity() == 5);
    CHECK(b.parameter_count() == 2 * 5 * 4);
    b.alpha(2, 1) = 0.5;
    b.beta(3, 4) = -0.25;
    CHECK(b.angles()[1 * 4 + 2] == 0.5);
    CHECK(b.angles()[(5 + 4) * 4 + 3] == -0.25);
    CHECK_THROWS_AS(BlockParams(-1, 1), InvalidInput);
    CHECK_THROWS_AS(BlockParams(2, 0), InvalidInput);

    for (int nb = 0; nb <= 6; ++nb) {
        const auto pattern = entangler_pattern(nb);
        CHECK(pattern.size() == static_cast<std::size_t>(nb == 0 ? 1 : 2 * nb));
        std::multiset<std::pair<int, int>> got, want;
        for (const auto& g : pattern) got.insert({g.control, g.target});
        for (int q = 0; q + 1 < nb; ++q) want.insert({2 + q, 3 + q});
        for (int q = 0; q < nb; ++q) want.insert({2 + q, q % 2});
        want.insert({0, 1});
        CHECK(got == want);
        Circuit c(nb + 2);
        for (const auto& g : pattern) c.add(g);
        int degree = 0;
        for (int q = 0; q < nb + 2; ++q) {
            int d = 0;
            for (const auto& g : pattern) d += (g.control == q || g.target == q);
            degree = std::max(degree, d);
        }
        CHECK(depth(c) == static_cast<std::size_t>(degree));
    }
}

TEST_CASE("block unitary matrix agrees with its fragment") {
    Rng rng(13);
    const auto blocks = random_blocks(1, 2, 3, rng);
    const BlockUnitary bu = build_block_unitary(blocks[0]);
    CHECK(unitarity_residual(bu.matrix) <= 1e-12);
    CHECK((bu.matrix - oracle::circuit_matrix(bu.fragment)).norm() <= 1e-12);
    CHECK(counts(bu.fragment).cnot == 3 * 4);

    BlockParams zero(3, 2);
    Circuit ent(5);
    for (const auto& g : entangler_pattern(3)) ent.add(g);
    const CMatrix ue = oracle::circuit_matrix(ent);
    CHECK((build_block_unitary(zero).matrix - ue * ue).norm() <= 1e-12);
}

TEST_CASE("extract_core") {
    const QttCore id = extract_core(CMatrix::Identity(16, 16), 4, 4);
    for (std::size_t a = 0; a < 4; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (std::size_t b = 0; b < 4; ++b)
                    CHECK(id.at(a, i, j, b) == cplx{(i == 0 && j == 0 && a == b) ? 1.0 : 0.0, 0.0});

    Rng rng(14);
    const CMatrix u = oracle::random_unitary(32, rng);
    const QttCore c = extract_core(u, 8, 8);
    CMatrix v(32, 8);
    for (std::size_t a = 0; a < 8; ++a)
        for (int p = 0; p < 4; ++p)
            for (std::size_t b = 0; b < 8; ++b)
                v(static_cast<Eigen::Index>(p * 8 + b), static_cast<Eigen::Index>(a)) = c.at(a, p / 2, p % 2, b);
    CHECK(isometry_residual(v) <= 1e-12);
    CHECK_THROWS_AS(extract_core(u, 9, 1), InvalidInput);
    CHECK_THROWS_AS(extract_core(u, 1, 0), InvalidInput);
}

TEST_CASE("unitary cores match the column chain and the circuit") {
    Rng rng(15);
    for (int nb : {0, 1, 2, 3}) {
        const auto blocks = random_blocks(3, nb, 2, rng);
        const QttCores cores = unitary_cores(blocks);
        const auto chain = column_chain(blocks);
        CHECK(oracle::max_abs(contract_values(cores), chain) <= 1e-12);
        const Encoding e = encode_unitary(blocks);
        const StateVector s = simulate(e.circuit);
        std::vector<cplx> slice(s.amplitudes().begin(), s.amplitudes().begin() + 64);
        CHECK(oracle::max_abs(slice, chain) <= 1e-12);
    }
}

TEST_CASE("zero-angle blocks decode to the CNOT chain pattern") {
    std::vector<BlockParams> blocks(3, BlockParams(2, 2));
    const auto chain = column_chain(blocks);
    double total = 0.0;
    for (const auto& v : chain) total += std::norm(v);
    const Encoding e = encode_unitary(blocks, 5.0);
    const Image img = roundtrip(e);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto [x, y] = pixel_of(i, 3);
        CHECK(img.at(x, y) == doctest::Approx(5.0 * std::norm(chain[i]) / total).epsilon(1e-12));
    }
}

TEST_CASE("unitary encoding resources") {
    std::vector<BlockParams> blocks(5, BlockParams(3, 4));
    const Encoding e = encode_unitary(blocks);
    CHECK(e.circuit.qubits() == 13);
    const GateCounts g = counts(e.circuit);
    CHECK(g.fused_single_qubit == 100);
    CHECK(g.single_qubit == 200);
    CHECK(g.cnot == 120);
    CHECK(g.fused_total == 220);

    for (int levels : {2, 3, 5})
        for (int layers : {1, 3})
            for (int nb : {1, 2, 3, 4}) {
                const Encoding x = encode_unitary(std::vector<BlockParams>(static_cast<std::size_t>(levels), BlockParams(nb, layers)));
                CHECK(counts(x.circuit).cnot == static_cast<std::size_t>(levels * layers * 2 * nb));
                CHECK(x.circuit.qubits() == 2 * levels + nb);
            }
}

TEST_CASE("unitary depth is affine in the layer count") {
    std::vector<double> d;
    for (int layers = 1; layers <= 20; ++layers)
        d.push_back(static_cast<double>(depth(encode_unitary(std::vector<BlockParams>(5, BlockParams(3, layers))).circuit,
                                              DepthMode::FusedSingleQubit)));
    const double slope = d[1] - d[0];
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] - d[i - 1] == slope);
    CHECK(d[0] == doctest::Approx(21.0).epsilon(0.2));
}

TEST_CASE("decode rejects mismatched layouts") {
    Rng rng(16);
    const Encoding e = encode_amplitude(oracle::random_image(4, rng));
    CHECK_THROWS_AS(decode(StateVector(3), e.layout), StructuralError);
    EncodingLayout bad = e.layout;
    bad.levels = 3;
    CHECK_THROWS_AS(decode(StateVector(4), bad), StructuralError);
}

TEST_CASE("bond qubits for rank") {
    CHECK(bond_qubits_for_rank(1) == 0);
    CHECK(bond_qubits_for_rank(2) == 1);
    CHECK(bond_qubits_for_rank(3) == 2);
    CHECK(bond_qubits_for_rank(8) == 3);
}
