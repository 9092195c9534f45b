#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsk/coxeter.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace qsk::coxeter;

namespace {

ReducedWord make_word(std::vector<int> letters, int n) {
  ReducedWord w;
  w.letters = std::move(letters);
  w.n = n;
  return w;
}

// Minimal word length for every permutation via breadth-first search over
// the Cayley graph; independent of the inversion-count formula.
std::map<Perm, int> bfs_lengths(int n) {
  std::map<Perm, int> dist;
  std::vector<Perm> frontier{Perm::identity(n)};
  dist[frontier[0]] = 0;
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& p : frontier)
      for (int i = 1; i < n; ++i) {
        Perm q = mult(p, Perm::transposition(n, i));
        if (!dist.count(q)) {
          dist[q] = dist[p] + 1;
          next.push_back(q);
        }
      }
    frontier = std::move(next);
  }
  return dist;
}

// Scattered-subsequence test by dynamic programming, kept independent of
// the two-pointer implementation.
bool dp_subword(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::vector<char>> dp(a.size() + 1, std::vector<char>(b.size() + 1, 0));
  for (std::size_t j = 0; j <= b.size(); ++j) dp[0][j] = 1;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = dp[i][j - 1] || (a[i - 1] == b[j - 1] && dp[i - 1][j - 1]);
  return dp[a.size()][b.size()];
}

}  // namespace

TEST_CASE("perm_length basic values") {
  CHECK(perm_length(Perm::identity(4)) == 0);
  CHECK(perm_length(Perm::transposition(2, 1)) == 1);
  // omega_{3,1} = s_3 s_2 s_1 evaluated in S_4
  auto w = make_word({3, 2, 1}, 4);
  CHECK(perm_length(word_to_perm(w)) == 3);
}

TEST_CASE("perm_length equals Cayley-graph distance on all of S_4") {
  auto dist = bfs_lengths(4);
  for (const auto& [p, d] : dist) CHECK(perm_length(p) == d);
}

TEST_CASE("word_to_perm basics") {
  CHECK(word_to_perm(make_word({}, 3)).is_identity());
  CHECK(word_to_perm(make_word({1, 1}, 2)).is_identity());
  CHECK(word_to_perm(make_word({1, 2, 1}, 3)) == word_to_perm(make_word({2, 1, 2}, 3)));
}

namespace {

// all words of the given length over letters 1..max_letter
std::vector<std::vector<int>> enumerate_words(int len, int max_letter) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(len, 0);
  while (true) {
    std::vector<int> w(len);
    for (int i = 0; i < len; ++i) w[i] = idx[i] + 1;
    out.push_back(w);
    int carry = len - 1;
    while (carry >= 0 && ++idx[carry] == max_letter) idx[carry--] = 0;
    if (carry < 0) break;
  }
  return out;
}

}  // namespace

TEST_CASE("reduced flag: length bound with equality iff reduced, exhaustive over short words") {
  for (int len = 0; len <= 5; ++len) {
    for (const auto& letters : enumerate_words(len, 3)) {
      ReducedWord word = make_word(letters, 4);
      int l = perm_length(word_to_perm(word));
      CHECK(l <= word.length());
      bool red = check_reduced(word);
      CHECK(red == (l == word.length()));
    }
  }
}

TEST_CASE("omega_word expansions") {
  CHECK(omega_word(3, 2, 1).letters == std::vector<int>{1});
  CHECK(omega_word(3, 2, 2).letters == std::vector<int>{1, 2});
  CHECK(omega_word(3, 2, 3).letters == std::vector<int>{1, 2, 1});
  // last block empty at k = 1
  CHECK(omega_word(4, 2, 1).letters == std::vector<int>{2, 1});
  CHECK(omega_word(4, 2, 4).letters == std::vector<int>{2, 1, 3, 2, 1});
  CHECK_THROWS_AS(omega_word(3, 3, 1), std::invalid_argument);
}

TEST_CASE("omega_word(n, m, k) strips one letter per level") {
  for (int n = 3; n <= 5; ++n)
    for (int k = 2; k <= n; ++k) {
      auto full = omega_word(n, 2, k).letters;
      full.pop_back();
      CHECK(full == omega_word(n, 2, k - 1).letters);
    }
}

TEST_CASE("omega_word(n, m, n) is reduced for n <= 5, m = 2") {
  for (int n = 3; n <= 5; ++n) {
    auto w = omega_word(n, 2, n);
    CHECK(perm_length(word_to_perm(w)) == w.length());
    CHECK(w.reduced);
  }
}

TEST_CASE("coset_min_rep trivial cases") {
  CHECK(coset_min_rep(Perm::identity(4), 4, 2).is_identity());
  // any permutation of {1, 2} inside S_4 lies in the subgroup coset
  Perm p = Perm::transposition(4, 1);
  CHECK(coset_min_rep(p, 4, 2).is_identity());
}

TEST_CASE("coset_min_rep matches exhaustive minimum on S_4 and S_5, m = 2") {
  for (int n : {4, 5}) {
    int m = 2;
    auto subgroup_perms = all_perms(n - m);
    for (const auto& p : all_perms(n)) {
      Perm rep = coset_min_rep(p, n, m);
      // brute-force orbit minimum
      Perm best = p;
      int best_len = perm_length(p);
      int min_count = 1;
      for (const auto& sp : subgroup_perms) {
        Perm sigma = Perm::identity(n);
        for (int x = 1; x <= n - m; ++x) sigma.images[x - 1] = sp.images[x - 1];
        Perm cand = mult(sigma, p);
        int len = perm_length(cand);
        if (len < best_len) {
          best = cand;
          best_len = len;
          min_count = 1;
        } else if (len == best_len && !(cand == best)) {
          ++min_count;
        }
      }
      CHECK(min_count == 1);  // minimum is unique in its coset
      CHECK(rep == best);
      CHECK(perm_length(rep) <= perm_length(p));
    }
  }
}

TEST_CASE("braid lemma instances: omega_{n-2,1} omega_{n-1,1} = omega_{n-1,1} omega_{n-1,2}") {
  for (int n : {3, 4, 5}) {
    ReducedWord lhs = make_word({}, n), rhs = make_word({}, n);
    for (int l = n - 2; l >= 1; --l) lhs.letters.push_back(l);
    for (int l = n - 1; l >= 1; --l) lhs.letters.push_back(l);
    for (int l = n - 1; l >= 1; --l) rhs.letters.push_back(l);
    for (int l = n - 1; l >= 2; --l) rhs.letters.push_back(l);
    CHECK(braid_equal(lhs, rhs));
  }
  CHECK_FALSE(braid_equal(make_word({1, 2}, 3), make_word({2, 1}, 3)));
}

TEST_CASE("braid_equal agrees with word_to_perm on random word pairs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(rng() % 2);
    auto rand_word = [&](int len) {
      ReducedWord w = make_word({}, n);
      for (int i = 0; i < len; ++i) w.letters.push_back(1 + static_cast<int>(rng() % (n - 1)));
      return w;
    };
    auto w1 = rand_word(static_cast<int>(rng() % 6));
    auto w2 = rand_word(static_cast<int>(rng() % 6));
    CHECK(braid_equal(w1, w2) == (word_to_perm(w1) == word_to_perm(w2)));
  }
}

TEST_CASE("scattered subwords") {
  CHECK(is_scattered_subword(make_word({}, 4), make_word({1, 2, 3}, 4)));
  CHECK(is_scattered_subword(make_word({1, 1}, 4), make_word({1, 2, 1}, 4)));
  CHECK_FALSE(is_scattered_subword(make_word({2, 1}, 4), make_word({1, 2}, 4)));
}

TEST_CASE("scattered subword matches DP oracle on all short word pairs") {
  // all pairs of words of length <= 3 over {1,2,3} plus random longer pairs
  std::vector<std::vector<int>> words;
  for (int len = 0; len <= 3; ++len)
    for (auto& w : enumerate_words(len, 3)) words.push_back(std::move(w));
  for (const auto& a : words)
    for (const auto& b : words)
      CHECK(is_scattered_subword(make_word(a, 4), make_word(b, 4)) == dp_subword(a, b));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto rand_vec = [&](int len) {
      std::vector<int> v(len);
      for (auto& x : v) x = 1 + static_cast<int>(rng() % 3);
      return v;
    };
    auto a = rand_vec(static_cast<int>(rng() % 6));
    auto b = rand_vec(static_cast<int>(rng() % 6));
    CHECK(is_scattered_subword(make_word(a, 4), make_word(b, 4)) == dp_subword(a, b));
  }
}

TEST_CASE("word serialization round trip") {
  auto w = make_word({2, 1, 3, 2, 1}, 4);
  CHECK(word_to_string(w) == "2,1,3,2,1");
  CHECK(word_from_string("2,1,3,2,1", 4).letters == w.letters);
  CHECK(word_from_string("", 4).letters.empty());
}
