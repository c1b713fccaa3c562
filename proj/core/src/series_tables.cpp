#include "starspec/series.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace starspec {

namespace {

Rational signed_power_of_two(int exponent) {
  Rational out = BigInt(1) << exponent;
  return exponent % 2 ? -out : out;
}

// Dense table over (e, e', e'', S) with e + e' + e'' <= E and S <= e''.
class ExcessTable {
 public:
  explicit ExcessTable(int excess) : e_(excess), data_(static_cast<std::size_t>((e_ + 1) * (e_ + 1) * (e_ + 1) * (e_ + 1))) {}
  Rational& at(int a, int b, int c, int s) {
    return data_[static_cast<std::size_t>(((a * (e_ + 1) + b) * (e_ + 1) + c) * (e_ + 1) + s)];
  }
  int excess() const { return e_; }

 private:
  int e_;
  std::vector<Rational> data_;
};

std::vector<Monomial> finish(std::map<std::pair<int, int>, Rational>& terms) {
  std::vector<Monomial> out;
  for (auto& [ab, c] : terms) {
    if (c == 0) continue;
    out.push_back({ab.first, ab.second, c, to_double(c)});
  }
  std::sort(out.begin(), out.end(), [](const Monomial& x, const Monomial& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

std::vector<Monomial> f3_block(int j, int E) {
  struct Component {
    int dt, dtp, dtpp, s;
    Rational g;
  };
  std::vector<Component> comps;
  for (int dt = 0; dt <= E; ++dt) {
    for (int dtp = 0; dt + dtp <= E; ++dtp) {
      for (int dtpp = 0; dt + dtp + dtpp <= E; ++dtpp) {
        const int t = dt + 1, tp = dtp + 1, tpp = dtpp + 1;
        for (int s = 0; s < tpp; ++s) {
          const BigInt num = binomial(s + t - 1, s) * binomial(tpp + tp - s - 2, tp - 1);
          if (num == 0) continue;
          comps.push_back({dt, dtp, dtpp, s, Rational(num, factorial(t) * factorial(tp) * factorial(tpp))});
        }
      }
    }
  }

  ExcessTable acc(E);
  acc.at(0, 0, 0, 0) = 1;
  for (int i = 0; i < j; ++i) {
    ExcessTable next(E);
    for (int a = 0; a <= E; ++a) {
      for (int b = 0; a + b <= E; ++b) {
        for (int c = 0; a + b + c <= E; ++c) {
          for (int S = 0; S <= c; ++S) {
            const Rational& v = acc.at(a, b, c, S);
            if (v == 0) continue;
            for (const auto& comp : comps) {
              if (a + b + c + comp.dt + comp.dtp + comp.dtpp > E) continue;
              next.at(a + comp.dt, b + comp.dtp, c + comp.dtpp, S + comp.s) += v * comp.g;
            }
          }
        }
      }
    }
    acc = std::move(next);
  }

  std::map<std::pair<int, int>, Rational> terms;
  const Rational lead = Rational(2, factorial(j));
  for (int a = 0; a <= E; ++a) {
    for (int b = 0; a + b <= E; ++b) {
      for (int c = 0; a + b + c <= E; ++c) {
        for (int S = 0; S <= c; ++S) {
          const Rational& v = acc.at(a, b, c, S);
          if (v == 0) continue;
          const int T = a + j, Tp = b + j, Tpp = c + j;
          const Rational weight(factorial(T - 1) * factorial(Tp - 1) * factorial(Tpp - 1),
                                factorial(S + T - 1) * factorial(Tpp + Tp - S - j - 1));
          terms[{S + T, Tp + Tpp - S - j}] += lead * weight * signed_power_of_two(T + Tp + Tpp) * v;
        }
      }
    }
  }
  return finish(terms);
}

std::vector<Monomial> f4_block(int j, int E) {
  // Edges 2..j: state (T' - (j-1), T'' - (j-1)).
  std::vector<std::vector<Rational>> rest(static_cast<std::size_t>(E + 1),
                                          std::vector<Rational>(static_cast<std::size_t>(E + 1)));
  rest[0][0] = 1;
  for (int i = 1; i < j; ++i) {
    std::vector<std::vector<Rational>> next(static_cast<std::size_t>(E + 1),
                                            std::vector<Rational>(static_cast<std::size_t>(E + 1)));
    for (int a = 0; a <= E; ++a) {
      for (int b = 0; a + b <= E; ++b) {
        const Rational& v = rest[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (v == 0) continue;
        for (int da = 0; a + b + da <= E; ++da) {
          for (int db = 0; a + b + da + db <= E; ++db) {
            const int tp = da + 1, tpp = db + 1;
            const Rational h(binomial(tpp + tp - 2, tp - 1), factorial(tp) * factorial(tpp));
            next[static_cast<std::size_t>(a + da)][static_cast<std::size_t>(b + db)] += v * h;
          }
        }
      }
    }
    rest = std::move(next);
  }

  std::map<std::pair<int, int>, Rational> terms;
  const Rational lead = Rational(2, factorial(j - 1));
  for (int a = 0; a <= E; ++a) {
    for (int b = 0; a + b <= E; ++b) {
      const Rational& v = rest[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (v == 0) continue;
      for (int d1p = 0; a + b + d1p <= E; ++d1p) {
        for (int d1pp = 0; a + b + d1p + d1pp <= E; ++d1pp) {
          const int t1p = d1p + 1, t1pp = d1pp + 1;
          const int Tp = a + (j - 1) + t1p;
          const int Tpp = b + (j - 1) + t1pp;
          for (int s = 0; s < t1pp; ++s) {
            const Rational g1(binomial(s + t1p - 1, s),
                              factorial(t1pp - 1 - s) * factorial(t1p) * factorial(t1pp));
            const Rational weight(factorial(Tp - 1) * factorial(Tpp - 1), factorial(Tpp + Tp - t1pp + s - j));
            terms[{Tpp + Tp - t1pp + s - j + 1, t1pp - 1 - s}] +=
                lead * weight * signed_power_of_two(Tp + Tpp) * g1 * v;
          }
        }
      }
    }
  }
  return finish(terms);
}

struct BlockPair {
  std::vector<Monomial> f3;
  std::vector<Monomial> f4;
};

std::shared_ptr<const BlockPair> block(int j, int excess) {
  static std::map<std::pair<int, int>, std::shared_ptr<const BlockPair>> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({j, excess}); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const BlockPair>(BlockPair{f3_block(j, excess), f4_block(j, excess)});
  std::lock_guard lock(mutex);
  return cache.try_emplace({j, excess}, std::move(built)).first->second;
}

}  // namespace

const KernelSeries& kernel_series(int j_max, int excess) {
  if (excess < 0) throw std::invalid_argument("series excess must be >= 0");
  static std::map<std::pair<int, int>, std::unique_ptr<KernelSeries>> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({j_max, excess}); it != cache.end()) return *it->second;
  }
  auto series = std::make_unique<KernelSeries>();
  series->j_max = j_max;
  series->excess = excess;
  for (int j = 3; j <= j_max; ++j) {
    const auto b = block(j, excess);
    series->f3.push_back(b->f3);
    series->f4.push_back(b->f4);
  }
  std::lock_guard lock(mutex);
  return *cache.try_emplace({j_max, excess}, std::move(series)).first->second;
}

std::vector<Rational> c_coefficients(int j, int m_max) {
  if (j < 2) throw std::invalid_argument("C_M needs j >= 2");
  if (m_max < 0) return {};
  const auto dim = static_cast<std::size_t>(m_max + 1);
  // acc[K][N]: sum over (k_i, n_i) of prod binom(n_i + k_i, n_i) / ((n_i + 1)! (k_i + 1)!)
  std::vector<std::vector<Rational>> acc(dim, std::vector<Rational>(dim));
  acc[0][0] = 1;
  for (int i = 0; i < j; ++i) {
    std::vector<std::vector<Rational>> next(dim, std::vector<Rational>(dim));
    for (int K = 0; K <= m_max; ++K) {
      for (int N = 0; K + N <= m_max; ++N) {
        const Rational& v = acc[static_cast<std::size_t>(K)][static_cast<std::size_t>(N)];
        if (v == 0) continue;
        for (int k = 0; K + N + k <= m_max; ++k) {
          for (int n = 0; K + N + k + n <= m_max; ++n) {
            const Rational w(binomial(n + k, n), factorial(n + 1) * factorial(k + 1));
            next[static_cast<std::size_t>(K + k)][static_cast<std::size_t>(N + n)] += v * w;
          }
        }
      }
    }
    acc = std::move(next);
  }
  std::vector<Rational> out(dim);
  for (int M = 0; M <= m_max; ++M) {
    Rational sum = 0;
    for (int K = 0; K <= M; ++K) {
      const int N = M - K;
      sum += Rational(factorial(K + j - 1) * factorial(N + j - 1), factorial(M + j - 1)) *
             acc[static_cast<std::size_t>(K)][static_cast<std::size_t>(N)];
    }
    out[static_cast<std::size_t>(M)] = signed_power_of_two(M) * sum;
  }
  return out;
}

}  // namespace starspec
