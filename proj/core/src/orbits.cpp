#include "starspec/orbits.hpp"

#include "starspec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace starspec {

OrbitWord::OrbitWord(std::vector<int> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw std::invalid_argument("orbit word must be nonempty");
  for (int c : letters_) {
    if (c < 1) throw std::invalid_argument("orbit letters are edge labels >= 1");
  }
}

OrbitWord OrbitWord::parse(std::string_view text) {
  std::vector<int> letters;
  letters.reserve(text.size());
  for (char c : text) {
    if (c >= '1' && c <= '9') {
      letters.push_back(c - '0');
    } else if (c >= 'a' && c <= 'z') {
      letters.push_back(c - 'a' + 1);
    } else {
      throw std::invalid_argument("unsupported orbit letter '" + std::string(1, c) + "'");
    }
  }
  return OrbitWord(std::move(letters));
}

std::string OrbitWord::str() const {
  std::string out;
  const bool digits = std::all_of(letters_.begin(), letters_.end(), [](int c) { return c <= 9; });
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (digits) {
      out += static_cast<char>('0' + letters_[i]);
    } else {
      if (i) out += '.';
      out += std::to_string(letters_[i]);
    }
  }
  return out;
}

int OrbitClass::total_visits() const { return std::accumulate(n.begin(), n.end(), 0); }
int OrbitClass::total_blocks() const { return std::accumulate(m.begin(), m.end(), 0); }

bool OrbitClass::well_formed() const {
  if (n.empty() || n.size() != m.size()) return false;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (m[i] < 1 || m[i] > n[i]) return false;
  }
  return true;
}

bool OrbitClass::feasible() const {
  if (!well_formed()) return false;
  if (j() == 1) return m[0] == 1;
  const int total = total_blocks();
  return std::all_of(m.begin(), m.end(), [&](int mi) { return 2 * mi <= total; });
}

OrbitClass classify(const OrbitWord& word) {
  const auto& w = word.letters();
  std::vector<int> labels(w);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  OrbitClass cls;
  const std::size_t k = w.size();
  for (int label : labels) {
    int visits = 0;
    int blocks = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i] != label) continue;
      ++visits;
      if (w[(i + k - 1) % k] != label) ++blocks;
    }
    cls.n.push_back(visits);
    cls.m.push_back(std::max(blocks, 1));  // a one-letter word is a single block
  }
  return cls;
}

int repetition_number(const OrbitWord& word) {
  const auto& w = word.letters();
  const std::size_t k = w.size();
  for (std::size_t p = 1; p <= k; ++p) {
    if (k % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < k && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return static_cast<int>(k / p);
  }
  return 1;
}

OrbitWord canonical_rotation(const OrbitWord& word) {
  auto best = word.letters();
  auto rot = best;
  for (std::size_t s = 1; s < rot.size(); ++s) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return OrbitWord(std::move(best));
}

double amplitude(const OrbitWord& word, int v) {
  const auto& w = word.letters();
  const std::size_t k = w.size();
  int backscatters = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (w[i] > v) throw std::invalid_argument("orbit letter exceeds number of edges");
    if (w[i] == w[(i + 1) % k]) ++backscatters;
  }
  const int transmissions = static_cast<int>(k) - backscatters;
  return std::pow(s_amplitude(Scattering::backscatter, v), backscatters) *
         std::pow(s_amplitude(Scattering::transmit, v), transmissions);
}

std::vector<OrbitWord> enumerate_class(const OrbitClass& cls) {
  std::vector<OrbitWord> out;
  if (!cls.feasible()) return out;
  std::vector<int> word;
  for (int i = 0; i < cls.j(); ++i) word.insert(word.end(), static_cast<std::size_t>(cls.n[i]), i + 1);
  do {
    OrbitWord candidate(word);
    if (canonical_rotation(candidate) != candidate) continue;
    if (classify(candidate).m == cls.m) out.push_back(std::move(candidate));
  } while (std::next_permutation(word.begin(), word.end()));
  return out;
}

Rational q_bruteforce(const OrbitClass& cls, int max_visits) {
  if (cls.total_visits() > max_visits) {
    throw std::length_error("class has N = " + std::to_string(cls.total_visits()) +
                            ", enumeration budget is " + std::to_string(max_visits));
  }
  Rational total = 0;
  for (const auto& w : enumerate_class(cls)) total += Rational(1, repetition_number(w));
  return total;
}

Rational q_formula(const OrbitClass& cls) {
  const int j = cls.j();
  if (j < 2) throw std::invalid_argument("q_formula requires j >= 2");
  if (cls.m.size() != cls.n.size()) throw std::invalid_argument("n and m differ in length");
  for (int i = 0; i < j; ++i) {
    if (cls.n[i] < 1 || cls.m[i] < 1) throw std::invalid_argument("n_i and m_i must be >= 1");
  }

  BigInt packets = 1;
  for (int i = 0; i < j; ++i) packets *= binomial(cls.n[i] - 1, cls.m[i] - 1);
  if (packets == 0) return 0;

  // Inclusion-exclusion over t with 1 <= t_i <= m_i.
  std::vector<int> t(static_cast<std::size_t>(j), 1);
  Rational sum = 0;
  while (true) {
    const int T = std::accumulate(t.begin(), t.end(), 0);
    BigInt weight = multinomial(t.data(), j);
    for (int i = 0; i < j; ++i) weight *= binomial(cls.m[i] - 1, t[i] - 1);
    const Rational term(weight, T);
    if (T % 2) sum -= term; else sum += term;

    int i = 0;
    while (i < j && t[i] == cls.m[i]) t[i++] = 1;
    if (i == j) break;
    ++t[i];
  }
  if (cls.total_blocks() % 2) sum = -sum;
  return Rational(packets) * sum;
}

BigInt partitions(int N, int K) {
  if (N < 1 || K < 1) throw std::invalid_argument("partitions requires N, K >= 1");
  if (K > N) return 0;
  return binomial(N - 1, K - 1);
}

namespace {

// Fredricksen-Kessler-Maiorana generation over the alphabet {0..v-1}.
void necklaces_rec(int t, int p, int k, int v, std::vector<int>& a, std::vector<int>& out,
                   const std::function<void(const std::vector<int>&, int)>& visit) {
  if (t > k) {
    if (k % p == 0) {
      for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i + 1)] + 1;
      visit(out, p);
    }
    return;
  }
  a[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t - p)];
  necklaces_rec(t + 1, p, k, v, a, out, visit);
  for (int c = a[static_cast<std::size_t>(t - p)] + 1; c < v; ++c) {
    a[static_cast<std::size_t>(t)] = c;
    necklaces_rec(t + 1, t, k, v, a, out, visit);
  }
}

}  // namespace

void for_each_necklace(int v, int k, const std::function<void(const std::vector<int>&, int)>& visit) {
  if (v < 1 || k < 1) throw std::invalid_argument("necklaces need v >= 1 and k >= 1");
  std::vector<int> a(static_cast<std::size_t>(k + 1), 0);
  std::vector<int> out(static_cast<std::size_t>(k));
  necklaces_rec(1, 1, k, v, a, out, visit);
}

}  // namespace starspec
