#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "g2rigid/ext_field.hpp"

namespace g2rigid {

/// How the undefined X_8 of the family is read: consecutive differences
/// among X_1..X_7 only, or the cyclic closure X_8 = X_1.
enum class FactorVariant { Consecutive, Cyclic };

std::string to_string(FactorVariant v);
FactorVariant parse_factor_variant(const std::string& s);

/// sum_j a[j] x_{j+1} + c0 + cs * s
struct LinearFactor {
    std::array<int, 6> a{};
    int c0 = 0;
    int cs = 0;

    bool is_constant() const;
    std::string format() const;  // in terms of x1..x6 and s
};

struct FiberFactorList {
    mpq_class s;
    FactorVariant variant = FactorVariant::Consecutive;
    std::vector<LinearFactor> factors;

    mpq_class evaluate(const std::array<mpq_class, 6>& x) const;
    std::string format() const;
};

/// f_s with X_7 = s substituted. NotInBase for s in {0, 1}.
FiberFactorList fiber_factors(const mpq_class& s, FactorVariant variant = FactorVariant::Consecutive);
/// Same factor shapes, for a residue s of a finite field.
std::vector<LinearFactor> fiber_factor_shapes(FactorVariant variant);

/// Quadratic character by Euler's criterion, chi(0) = 0.
int quad_char(const ExtField& f, ExtField::Element u);

/// f_s(x) in the field.
ExtField::Element evaluate_fiber(const ExtField& f, const std::vector<LinearFactor>& factors, ExtField::Element s,
                                 const std::array<ExtField::Element, 6>& x);

enum class Execution { Serial, Parallel };
enum class Character { Quadratic, Trivial };  // Trivial: 1 on nonzero, 0 at 0
enum class TransferMethod { Auto, Direct, Fourier };

struct NaiveCount {
    std::uint64_t n_nonzero = 0;
    std::int64_t t_chi = 0;
    std::int64_t fiber_points() const { return static_cast<std::int64_t>(n_nonzero) + t_chi; }
};

constexpr std::uint64_t kDefaultBudget = 1000000000ULL;

/// Full enumeration of F^6. Serial is the plain per-point reference; Parallel
/// hoists partial products and splits the outer loops across threads.
/// TooLarge when |F|^6 exceeds the budget, NotInBase for s in {0, 1}.
NaiveCount count_naive(const ExtField& f, ExtField::Element s, FactorVariant variant = FactorVariant::Consecutive,
                       std::uint64_t budget = kDefaultBudget, Execution exec = Execution::Parallel);

/// sum_x chi(f_s(x)) by transfer along the chain x1 -> ... -> x6. Direct keeps
/// exact 128-bit sums (TooLarge if |F|^6 might not fit); Fourier convolves
/// through the additive characters of F modulo primes = 1 mod p and
/// reconstructs by CRT. Auto picks Direct for small fields.
mpz_class count_transfer(const ExtField& f, ExtField::Element s, FactorVariant variant = FactorVariant::Consecutive,
                         Character chi = Character::Quadratic, TransferMethod method = TransferMethod::Auto,
                         Execution exec = Execution::Parallel);

/// Scalar operations count_transfer would perform with the given method.
double transfer_cost(std::uint64_t field_size, std::uint64_t p, TransferMethod method);

struct SeriesKey {
    std::uint64_t q = 0;
    int k = 0;
    std::int64_t s = 0;
    FactorVariant variant = FactorVariant::Consecutive;
};

struct SeriesTerm {
    int k = 0;
    std::uint64_t field_size = 0;
    std::string modulus;
    mpz_class t_chi;
    mpz_class n_nonzero;
    std::string method;
    bool naive_checked = false;
    bool naive_agrees = true;
    std::string alt_modulus;  // empty when the field has a single presentation (k*e = 1)
    bool alt_agrees = true;
    bool from_cache = false;

    mpz_class fiber_points() const { return n_nonzero + t_chi; }
    bool clean() const { return naive_agrees && alt_agrees; }
};

class SeriesCache {
public:
    virtual ~SeriesCache() = default;
    virtual std::optional<SeriesTerm> load(const SeriesKey& key) = 0;
    virtual void store(const SeriesKey& key, const SeriesTerm& term) = 0;
};

struct SeriesOptions {
    int k_max = 7;
    std::uint64_t budget = kDefaultBudget;
    FactorVariant variant = FactorVariant::Consecutive;
    bool check_naive = true;
    bool check_alt_modulus = true;
    Execution exec = Execution::Parallel;
    SeriesCache* cache = nullptr;
};

struct ChiSeries {
    std::uint64_t q = 0;
    std::int64_t s = 0;  // residue in the prime subfield
    FactorVariant variant = FactorVariant::Consecutive;
    std::vector<SeriesTerm> terms;

    std::vector<mpz_class> t_values() const;
    bool clean() const;
};

/// T_k over F_{q^k} for k = 1..k_max with s taken in the prime subfield of
/// F_q. NotInBase when s = 0 or 1 there; TooLarge (naming k) when a term
/// exceeds the budget or the field size limit.
ChiSeries chi_series(std::uint64_t q, std::int64_t s, const SeriesOptions& opts = {});

/// Smallest k <= k_max whose term chi_series would refuse, 0 if none.
int first_infeasible_k(std::uint64_t q, int k_max, std::uint64_t budget);

struct SpectralTerm {
    std::complex<double> lambda;
    double modulus = 0;
    int multiplicity = 1;      // as a root of the recurrence polynomial
    double count = 0;          // fitted coefficient epsilon_i
    long rounded_count = 0;
};

struct ZetaReport {
    std::uint64_t q = 0;
    std::int64_t s = 0;
    std::size_t terms_used = 0;
    std::vector<mpq_class> recurrence;  // monic characteristic polynomial, low degree first
    std::size_t model_length = 0;
    bool determined = false;            // 2 * model_length < terms_used: one term beyond the fit confirms it
    std::vector<SpectralTerm> spectrum;
    double max_normalized_trace = 0;     // max_k |T_k| / q^{3k}
    double weil_bound = 0;               // q^3 (1 + tolerance)
    double max_modulus = 0;
    bool weil_ok = true;
    std::size_t pure_weight6_roots = 0;  // roots with |lambda| = q^3 within tolerance
    long pure_weight6_count = 0;         // sum of their rounded counts
    bool q3_is_eigenvalue = false;       // exact: recurrence polynomial vanishes at q^3
    double fit_residual = 0;             // max relative error of the rounded power sum
    std::vector<std::string> flags;
};

constexpr double kModulusTolerance = 1e-6;

/// Minimal-length exact fit T_k = sum eps_i lambda_i^k (Berlekamp-Massey over
/// Q), roots of its square-free parts numerically, then the Weil check.
ZetaReport zeta_analysis(std::uint64_t q, const std::vector<mpz_class>& t_values);
ZetaReport zeta_analysis(const ChiSeries& series);

/// Minimal linear recurrence of a rational sequence: monic polynomial
/// c_0 + c_1 x + ... + x^L with sum_i c_i a_{j+i} = 0 for all valid j.
std::vector<mpq_class> berlekamp_massey(const std::vector<mpq_class>& seq);

enum class LocalType { SteinbergU7, U3U2U2, None };
std::string to_string(LocalType t);

struct LocalPrediction {
    mpz_class p;
    LocalType type = LocalType::None;
    long nu_s = 0;
    long nu_one_minus_s = 0;
};

struct LocalTypePrediction {
    mpq_class s;
    std::vector<LocalPrediction> primes;  // odd primes dividing s or 1 - s, ascending
    mpz_class a, b;                       // s = 1 + a / b in lowest terms, b > 0
    bool hypothesis_shape = false;        // a and b both have an odd prime divisor
    std::vector<int> steinberg_frobenius_exponents;  // after twist: 1, q, ..., q^6
};

/// NotInBase for s in {0, 1}; TooLarge if a numerator or denominator cannot
/// be factored by trial division up to 10^7.
LocalTypePrediction local_type_prediction(const mpq_class& s);

/// p-adic valuation of a nonzero rational.
long valuation(const mpq_class& x, const mpz_class& p);

}  // namespace g2rigid
