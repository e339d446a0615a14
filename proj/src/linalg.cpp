#include "g2rigid/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace g2rigid {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] <= 0 || (i > 0 && parts_[i] > parts_[i - 1]))
            throw Error(ErrorKind::ParseError, "partition must be positive and weakly decreasing");
    }
}

int Partition::total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

Partition Partition::conjugate() const {
    std::vector<int> conj;
    if (parts_.empty()) return Partition();
    for (int k = 1; k <= parts_.front(); ++k) {
        int count = 0;
        for (int p : parts_)
            if (p >= k) ++count;
        conj.push_back(count);
    }
    return Partition(std::move(conj));
}

std::string Partition::format() const {
    std::string s = "[";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
    return s + "]";
}

// Bareiss elimination on the integer matrix obtained by clearing row
// denominators, followed by back substitution to reduced form over Q.
Echelon<RationalField> rref_fraction_free(const QMatrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
    }

    std::vector<std::size_t> pivots;
    mpz_class prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        pivots.push_back(c);
        ++r;
    }

    QMatrix red(RationalField{}, rows, cols);
    for (std::size_t i = r; i-- > 0;) {
        const std::size_t pc = pivots[i];
        for (std::size_t j = pc; j < cols; ++j) {
            red(i, j) = mpq_class(a[i][j], a[i][pc]);
            red(i, j).canonicalize();
        }
        for (std::size_t k = i + 1; k < r; ++k) {
            const mpq_class factor = red(i, pivots[k]);
            if (sgn(factor) == 0) continue;
            for (std::size_t j = pivots[k]; j < cols; ++j) red(i, j) -= factor * red(k, j);
        }
    }
    return {std::move(red), std::move(pivots)};
}

FpMatrix reduce(const QMatrix& m, const PrimeField& field) {
    FpMatrix r(field, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = field.from_rational(m(i, j));
    return r;
}

}  // namespace g2rigid

namespace g2rigid {

namespace {

std::vector<mpz_class> positive_divisors(mpz_class v) {
    v = abs(v);
    std::vector<std::pair<mpz_class, unsigned>> factors;
    unsigned long steps = 0;
    for (mpz_class d = 2; d * d <= v; ++d) {
        if (++steps > 2000000) throw Error(ErrorKind::TooLarge, "coefficient too large to factor");
        unsigned e = 0;
        while (v % d == 0) {
            v /= d;
            ++e;
        }
        if (e) factors.emplace_back(d, e);
    }
    if (v > 1) factors.emplace_back(v, 1);
    std::vector<mpz_class> divs{1};
    for (const auto& [p, e] : factors) {
        const std::size_t before = divs.size();
        mpz_class pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < before; ++i) divs.push_back(divs[i] * pk);
        }
    }
    return divs;
}

}  // namespace

std::vector<mpq_class> rational_roots(const Polynomial<RationalField>& p) {
    std::vector<mpq_class> roots;
    if (p.degree() <= 0) return roots;
    mpz_class l = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::vector<mpz_class> c;
    for (const auto& x : p.coeffs()) c.push_back(x.get_num() * (l / x.get_den()));
    std::size_t low = 0;
    while (c[low] == 0) ++low;
    if (low > 0) roots.emplace_back(0);
    if (low + 1 < c.size()) {
        const auto nums = positive_divisors(c[low]);
        const auto dens = positive_divisors(c.back());
        for (const auto& a : nums)
            for (const auto& b : dens)
                for (int sign : {1, -1}) {
                    mpq_class r(sign * a, b);
                    r.canonicalize();
                    if (p.evaluate(r) == 0) roots.push_back(r);
                }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

}  // namespace g2rigid
