#include "clicksim/exact.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "clicksim/errors.hpp"
#include "clicksim/stats.hpp"

namespace clicksim {

namespace {

// Compensated (Kahan) accumulator.  The signed subset sums below cancel
// heavily for large N, and plain double is not enough: at N = 16 it already
// leaves ~1e-10 of garbage in quantities that must be zero to 1e-9.
struct Kahan {
  long double sum = 0.0L;
  long double comp = 0.0L;
  void add(long double x) {
    const long double y = x - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Pascal triangle in long double; exact for every entry that fits the
// 64-bit mantissa (all of binom(64, k) does).
std::vector<std::vector<long double>> binomials(int n) {
  std::vector<std::vector<long double>> b(n + 1);
  for (int i = 0; i <= n; ++i) {
    b[i].assign(i + 1, 1.0L);
    for (int j = 1; j < i; ++j) b[i][j] = b[i - 1][j - 1] + b[i - 1][j];
  }
  return b;
}

double clamp_prob(double x) {
  if (x < 0.0 && x > -1e-9) return 0.0;
  if (x > 1.0 && x < 1.0 + 1e-9) return 1.0;
  return x;
}

bool all_nu_zero(const DetectorConfig& det) {
  for (double v : det.nu)
    if (v != 0.0) return false;
  return true;
}

// All q_j bitwise equal and all nu_j bitwise equal.  Uniform splitters with
// a broadcast detector produce exactly this, which is what the capless
// closed form is for; nearly-equal weights take the general path.
bool is_balanced(const ClickWeights& cw, const DetectorConfig& det) {
  for (double q : cw.q)
    if (q != cw.q[0]) return false;
  for (double v : det.nu)
    if (v != det.nu[0]) return false;
  return true;
}

// Balanced case: every subset of size t has the same no-click probability
// P0(t) = (1 - t q)^n e^{-t nu}, so the subset sum collapses to
//   C(k|n) = binom(N,k) sum_{s=0..k} (-1)^s binom(k,s) P0(N-k+s).
void fill_balanced(ConditionalTables& t, double q, double nu) {
  const int N = t.n_modes;
  const auto B = binomials(N);
  const long double qL = q;
  const long double e = std::exp(-(long double)nu);
  std::vector<long double> base(N + 1), decay(N + 1);
  for (int s = 0; s <= N; ++s) {
    base[s] = std::pow(e, (long double)s);  // n = 0 column
    decay[s] = std::max(0.0L, 1.0L - s * qL);
  }
  for (int n = 0; n <= t.n_max; ++n) {
    for (int k = 0; k <= N; ++k) {
      const int z = N - k;
      Kahan acc;
      for (int s = 0; s <= k; ++s) {
        const long double term = B[k][s] * base[z + s];
        acc.add((s & 1) ? -term : term);
      }
      t.c_given[n * (N + 1) + k] =
          clamp_prob(static_cast<double>(B[N][k] * acc.sum));
    }
    if (n < t.n_max)
      for (int s = 0; s <= N; ++s) base[s] *= decay[s];
  }
}

// General case: one pass per column n over all 2^N subsets V, with
// P0(V, n) = (1 - sum_{j in V} q_j)^n prod_{j in V} e^{-nu_j} updated
// incrementally between columns.  A subset of size v contributes to every
// k >= N - v with weight (-1)^{v-(N-k)} binom(v, N-k).
void fill_unbalanced(ConditionalTables& t, const ClickWeights& cw,
                     const DetectorConfig& det) {
  const int N = t.n_modes;
  const std::size_t n_subsets = std::size_t{1} << N;
  const auto B = binomials(N);

  std::vector<double> decay(n_subsets);  // 1 - sum_{j in V} q_j
  std::vector<long double> p0(n_subsets);
  decay[0] = 1.0;
  p0[0] = 1.0L;
  for (std::size_t v = 1; v < n_subsets; ++v) {
    const int low = std::countr_zero(v);
    const std::size_t rest = v & (v - 1);
    decay[v] = std::max(0.0, decay[rest] - cw.q[low]);
    p0[v] = p0[rest] * std::exp(-(long double)det.nu[low]);  // n = 0 value
  }

  std::vector<Kahan> acc(N + 1);
  for (int n = 0; n <= t.n_max; ++n) {
    for (auto& a : acc) a = Kahan{};
    for (std::size_t v = 0; v < n_subsets; ++v) {
      const int size = std::popcount(v);
      const long double base = p0[v];
      // z = N - k runs over 0..size
      for (int z = 0; z <= size; ++z) {
        const long double term = B[size][z] * base;
        acc[N - z].add(((size - z) & 1) ? -term : term);
      }
    }
    for (int k = 0; k <= N; ++k)
      t.c_given[n * (N + 1) + k] =
          clamp_prob(static_cast<double>(acc[k].sum));
    if (n < t.n_max)
      for (std::size_t v = 0; v < n_subsets; ++v) p0[v] *= decay[v];
  }
}

}  // namespace

double no_click_prob(std::span<const int> subset, int n,
                     std::span<const double> q, std::span<const double> nu) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (q.size() != nu.size())
    throw std::invalid_argument("q and nu lengths differ");
  std::uint64_t seen = 0;
  long double qsum = 0.0L, nusum = 0.0L;
  for (int j : subset) {
    if (j < 0 || j >= static_cast<int>(q.size()))
      throw std::invalid_argument("subset index out of range");
    if (q.size() <= 64) {
      if (seen & (std::uint64_t{1} << j))
        throw std::invalid_argument("subset has a repeated mode");
      seen |= std::uint64_t{1} << j;
    }
    qsum += q[j];
    nusum += nu[j];
  }
  const long double decay = std::max(0.0L, 1.0L - qsum);
  return static_cast<double>(std::pow(decay, (long double)n) *
                             std::exp(-nusum));
}

ConditionalTables conditional_tables(const MultiplexConfig& mux,
                                     const DetectorConfig& det, int n_max,
                                     int mode_cap) {
  validate_pair(mux, det);
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const ClickWeights cw = effective_click_weights(mux, det);
  const int N = mux.n_modes();

  ConditionalTables t;
  t.n_modes = N;
  t.n_max = n_max;
  t.c_given.assign(std::size_t(N + 1) * (n_max + 1), 0.0);
  t.p_given.assign(std::size_t(N) * (n_max + 1), 0.0);

  const bool balanced = is_balanced(cw, det);
  if (balanced) {
    fill_balanced(t, cw.q[0], det.nu[0]);
  } else {
    if (N > mode_cap)
      throw ModeCountError(
          "unbalanced configuration with " + std::to_string(N) +
          " modes exceeds the subset-enumeration cap of " +
          std::to_string(mode_cap) + "; use the Monte Carlo engine");
    fill_unbalanced(t, cw, det);
  }

  // Marginals P(j|n) = 1 - (1 - q_j)^n e^{-nu_j}.
  for (int j = 0; j < N; ++j) {
    const long double enu = std::exp(-(long double)det.nu[j]);
    long double surv = enu;
    for (int n = 0; n <= n_max; ++n) {
      t.p_given[n * N + j] = clamp_prob(static_cast<double>(1.0L - surv));
      surv *= 1.0L - (long double)cw.q[j];
    }
  }

  // Without dark counts, n photons can fire at most n detectors; the signed
  // sums leave ~1e-18 residue there, which this pins to the exact zero.
  if (all_nu_zero(det))
    for (int n = 0; n <= n_max; ++n)
      for (int k = n + 1; k <= N; ++k) t.c_given[n * (N + 1) + k] = 0.0;

  return t;
}

ConditionalColumn brute_force_tables(const MultiplexConfig& mux,
                                     const DetectorConfig& det, int n) {
  validate_pair(mux, det);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  const int N = mux.n_modes();
  double cost = 1.0;
  for (int i = 0; i < n; ++i) {
    cost *= N + 1;
    if (cost > 1e7)
      throw std::invalid_argument(
          "brute-force enumeration (N+1)^n exceeds 1e7 outcomes");
  }
  const ClickWeights cw = effective_click_weights(mux, det);

  // Probability of each click pattern from the photons alone.  Outcome
  // digits: 0..N-1 = detected in that mode, N = not detected anywhere.
  std::map<std::uint64_t, long double> pattern;
  const auto place = [&](auto&& self, int i, std::uint64_t mask,
                         long double prob) -> void {
    if (i == n) {
      pattern[mask] += prob;
      return;
    }
    for (int d = 0; d <= N; ++d) {
      const long double pd = d < N ? cw.q[d] : cw.q_loss;
      if (pd == 0.0L) continue;
      self(self, i + 1, d < N ? mask | (std::uint64_t{1} << d) : mask,
           prob * pd);
    }
  };
  if (N > 64) throw std::invalid_argument("brute force supports N <= 64");
  place(place, 0, 0, 1.0L);

  // Dark counts, one mode at a time: each doubles the pattern support.
  for (int j = 0; j < N; ++j) {
    if (det.nu[j] == 0.0) continue;
    const long double fire = -std::expm1(-(long double)det.nu[j]);
    const long double stay = 1.0L - fire;
    std::map<std::uint64_t, long double> next;
    for (const auto& [mask, prob] : pattern) {
      next[mask] += prob * stay;
      next[mask | (std::uint64_t{1} << j)] += prob * fire;
    }
    pattern.swap(next);
  }

  ConditionalColumn col;
  col.c.assign(N + 1, 0.0);
  col.p.assign(N, 0.0);
  std::vector<long double> csum(N + 1, 0.0L), psum(N, 0.0L);
  for (const auto& [mask, prob] : pattern) {
    csum[std::popcount(mask)] += prob;
    for (std::uint64_t m = mask; m; m &= m - 1)
      psum[std::countr_zero(m)] += prob;
  }
  for (int k = 0; k <= N; ++k) col.c[k] = static_cast<double>(csum[k]);
  for (int j = 0; j < N; ++j) col.p[j] = static_cast<double>(psum[j]);
  return col;
}

ClickStatistics mix_click_statistics(const ConditionalTables& tables,
                                     const PhotonNumberDistribution& pnd) {
  if (pnd.n_max > tables.n_max)
    throw std::invalid_argument(
        "source n_max exceeds the tabulated range of the conditional tables");
  const int N = tables.n_modes;
  std::vector<double> c(N + 1), p(N);
  for (int k = 0; k <= N; ++k) {
    Kahan acc;
    for (int n = 0; n <= pnd.n_max; ++n)
      acc.add((long double)tables.c(k, n) * pnd.probs[n]);
    c[k] = static_cast<double>(acc.sum);
  }
  for (int j = 0; j < N; ++j) {
    Kahan acc;
    for (int n = 0; n <= pnd.n_max; ++n)
      acc.add((long double)tables.p(j, n) * pnd.probs[n]);
    p[j] = static_cast<double>(acc.sum);
  }
  return click_summary(std::move(c), std::move(p));
}

ClickStatistics exact_click_statistics(const PhotonNumberDistribution& pnd,
                                       const MultiplexConfig& mux,
                                       const DetectorConfig& det,
                                       int mode_cap) {
  return mix_click_statistics(conditional_tables(mux, det, pnd.n_max, mode_cap),
                              pnd);
}

double joint_click_prob(int j, int k, const PhotonNumberDistribution& pnd,
                        const MultiplexConfig& mux,
                        const DetectorConfig& det) {
  validate_pair(mux, det);
  const int N = mux.n_modes();
  if (j < 0 || j >= N || k < 0 || k >= N)
    throw std::invalid_argument("mode index out of range");
  if (j == k) throw std::invalid_argument("joint_click_prob needs j != k");
  const ClickWeights cw = effective_click_weights(mux, det);
  const long double ej = std::exp(-(long double)det.nu[j]);
  const long double ek = std::exp(-(long double)det.nu[k]);
  // P(both click | n) = 1 - P0({j}) - P0({k}) + P0({j,k})
  long double sj = ej, sk = ek, sjk = ej * ek;
  const long double dj = 1.0L - (long double)cw.q[j];
  const long double dk = 1.0L - (long double)cw.q[k];
  const long double djk =
      std::max(0.0L, 1.0L - (long double)cw.q[j] - (long double)cw.q[k]);
  Kahan acc;
  for (int n = 0; n <= pnd.n_max; ++n) {
    acc.add(pnd.probs[n] * (1.0L - sj - sk + sjk));
    sj *= dj;
    sk *= dk;
    sjk *= djk;
  }
  return clamp_prob(static_cast<double>(acc.sum));
}

double qpb_operator_form(const PhotonNumberDistribution& pnd,
                         const MultiplexConfig& mux,
                         const DetectorConfig& det) {
  validate_pair(mux, det);
  const int N = mux.n_modes();
  const ClickWeights cw = effective_click_weights(mux, det);

  // Marginals p_j mixed over rho(n); no tables needed.
  std::vector<double> p(N);
  for (int j = 0; j < N; ++j) {
    const long double enu = std::exp(-(long double)det.nu[j]);
    long double surv = enu;
    Kahan acc;
    for (int n = 0; n <= pnd.n_max; ++n) {
      acc.add(pnd.probs[n] * (1.0L - surv));
      surv *= 1.0L - (long double)cw.q[j];
    }
    p[j] = static_cast<double>(acc.sum);
  }

  Kahan num;
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k) {
      const long double cov =
          (long double)joint_click_prob(j, k, pnd, mux, det) -
          (long double)p[j] * p[k];
      num.add(2.0L * cov);
    }
  Kahan den;
  for (int j = 0; j < N; ++j) den.add((long double)p[j] * (1.0 - p[j]));
  if (!(den.sum > kDegenerateEps))
    throw DegenerateStatisticsError(
        "covariance-form denominator sum p_j(1-p_j) = " +
            std::to_string(static_cast<double>(den.sum)) + " is degenerate",
        static_cast<double>(den.sum));
  return static_cast<double>(num.sum / den.sum);
}

}  // namespace clicksim
