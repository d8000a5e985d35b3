#include <cmath>

#include "doctest.h"
#include "natpert/challenge.hpp"
#include "natpert/metrics.hpp"
#include "natpert/error.hpp"
#include "natpert/rng.hpp"

using namespace natpert;
using namespace natpert::challenge;

namespace {

mrc::QaItem answerable(const std::string& qid, const std::string& gold) {
  mrc::QaItem qa;
  qa.qid = qid;
  qa.question = "?";
  qa.answers = {{gold, std::nullopt}};
  return qa;
}

mrc::QaItem unanswerable(const std::string& qid, const std::string& plausible) {
  mrc::QaItem qa;
  qa.qid = qid;
  qa.question = "?";
  qa.is_impossible = true;
  qa.plausible_answers = {{plausible, std::nullopt}};
  return qa;
}

}  // namespace

TEST_CASE("question_correctness rules") {
  auto qa = answerable("q", "Nikola Tesla");
  CHECK(question_correctness("Nikola Tesla", qa) == Correctness::Correct);
  CHECK(question_correctness("nikola tesla!", qa) == Correctness::Correct);  // normalization
  // shares one token: 0 < F1 < 1, EM = 0 -> Neither
  CHECK(question_correctness("Tesla coil", qa) == Correctness::Neither);
  CHECK(question_correctness("Edison", qa) == Correctness::Wrong);        // F1 = 0
  CHECK(question_correctness("unanswerable", qa) == Correctness::Wrong);  // claims no answer
  CHECK(question_correctness("", qa) == Correctness::Wrong);

  auto un = unanswerable("u", "Tesla");
  CHECK(question_correctness("", un) == Correctness::Correct);
  CHECK(question_correctness("unanswerable", un) == Correctness::Correct);
  CHECK(question_correctness("Tesla", un) == Correctness::Wrong);  // gave an answer span
}

TEST_CASE("lacks_robustness thresholds are strict") {
  RobustnessRule rule;  // 0.4
  auto qa = answerable("q", "one two three four five");
  // perturbed pred shares 2 of 5 gold tokens -> P=1, R=0.4, F1=4/7< 0.4? no; use 1 of 5
  // "one" vs gold: P=1, R=0.2, F1=1/3 = 0.333 < 0.4 -> lacks robustness
  CHECK(lacks_robustness("one two three four five", "one", qa, rule));
  // F1 exactly 0.4: pred "one zzz" -> overlap 1, P=0.5, R=0.2, F1=2*0.1/0.7=0.2857 <0.4 ...
  // craft F1 == 0.4: pred "one two" vs gold 5 tokens: overlap 2, P=1, R=0.4, F1=4/7≈0.571
  // gold "a1 a2" pred "a1 a2 x y z": P=0.4, R=1, F1=0.5714; use gold 3 pred "g1": P=1,R=1/3,F1=0.5
  auto qa2 = answerable("q2", "g1 g2");
  // pred "g1 x x x": overlap 1, P=0.25, R=0.5, F1=1/3 < 0.4 -> true
  CHECK(lacks_robustness("g1 g2", "g1 x x x", qa2, rule));
  // exactly 0.4: P=0.25, R=1 -> F1=0.4 with gold 1 token, pred 4 tokens incl. gold
  auto qa3 = answerable("q3", "gold");
  CHECK(metrics::token_f1("gold x y z", {"gold"}) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_FALSE(lacks_robustness("gold", "gold x y z", qa3, rule));  // "less than" is strict
  CHECK(lacks_robustness("gold", "gold x y z w", qa3, rule));      // 1/3 < 0.4
  // EM on original must be 1
  CHECK_FALSE(lacks_robustness("wrong", "also wrong", qa3, rule));
  // unanswerable: Correct -> Wrong per the correctness rules
  auto un = unanswerable("u", "x");
  CHECK(lacks_robustness("", "an answer", un, rule));
  CHECK_FALSE(lacks_robustness("", "", un, rule));
  CHECK_FALSE(lacks_robustness("an answer", "", un, rule));
}

namespace {

// one pair, one question, n models; forward_fail / reverse_fail control how
// many models lack robustness in each scenario for that question
std::vector<ModelPredictions> scripted_models(const mrc::QaItem& qa, int n_models,
                                              int forward_fail, int reverse_fail) {
  // forward failure: EM=1 on side_a, low F1 on side_b
  // reverse failure: EM=1 on side_b, low F1 on side_a
  std::vector<ModelPredictions> models;
  const std::string gold = qa.answers[0].text;
  for (int m = 0; m < n_models; ++m) {
    ModelPredictions mp;
    mp.model_name = "m" + std::to_string(m);
    std::string a = "zzz zz zz";  // F1 0 both directions by default
    std::string b = "zzz zz zz";
    if (m < forward_fail) {
      a = gold;
      b = "zzz zz zz";
    } else if (m < forward_fail + reverse_fail) {
      b = gold;
      a = "zzz zz zz";
    }
    mp.side_a[qa.qid] = a;
    mp.side_b[qa.qid] = b;
    models.push_back(std::move(mp));
  }
  return models;
}

}  // namespace

TEST_CASE("orient_pair follows the N/N'/Q/Q' comparison chain") {
  auto qa = answerable("q1", "the gold answer");
  SUBCASE("N > N' chooses forward") {
    auto models = scripted_models(qa, 4, 3, 1);
    auto d = orient_pair({qa}, models, RobustnessRule{}, 0);
    CHECK(d.n_forward == 3);
    CHECK(d.n_reverse == 1);
    CHECK(d.forward);
    CHECK_FALSE(d.tie_broken_randomly);
  }
  SUBCASE("N < N' chooses reverse") {
    auto models = scripted_models(qa, 4, 1, 3);
    auto d = orient_pair({qa}, models, RobustnessRule{}, 0);
    CHECK_FALSE(d.forward);
  }
  SUBCASE("N tie resolved by Q") {
    // two questions: q1 fails forward on one model, q2 fails reverse on one
    // model; additionally q3 fails forward on one model. N_fwd=2, N_rev=2
    // requires careful scripting: build 2 models manually.
    auto q1 = answerable("q1", "answer one");
    auto q2 = answerable("q2", "answer two");
    auto q3 = answerable("q3", "answer three");
    ModelPredictions m1{"m1", {}, {}};
    ModelPredictions m2{"m2", {}, {}};
    // m1: q1 forward-fails; q2 reverse-fails; q3 correct both sides
    m1.side_a = {{"q1", "answer one"}, {"q2", "zz"}, {"q3", "answer three"}};
    m1.side_b = {{"q1", "zz"}, {"q2", "answer two"}, {"q3", "answer three"}};
    // m2: q3 forward-fails; q2 reverse-fails again -> N_fwd=2 N_rev=2,
    // Q_fwd={q1,q3}=2, Q_rev={q2}=1 -> forward
    m2.side_a = {{"q1", "zz"}, {"q2", "zz"}, {"q3", "answer three"}};
    m2.side_b = {{"q1", "zz"}, {"q2", "answer two"}, {"q3", "zz"}};
    auto d = orient_pair({q1, q2, q3}, {m1, m2}, RobustnessRule{}, 0);
    CHECK(d.n_forward == 2);
    CHECK(d.n_reverse == 2);
    CHECK(d.q_forward == 2);
    CHECK(d.q_reverse == 1);
    CHECK(d.forward);
    CHECK_FALSE(d.tie_broken_randomly);
  }
  SUBCASE("full tie breaks randomly but deterministically per seed") {
    auto models = scripted_models(qa, 4, 1, 1);
    auto d1 = orient_pair({qa}, models, RobustnessRule{}, 12345);
    auto d2 = orient_pair({qa}, models, RobustnessRule{}, 12345);
    CHECK(d1.tie_broken_randomly);
    CHECK(d1.forward == d2.forward);
    // different seeds eventually flip the coin
    bool saw_fwd = false, saw_rev = false;
    for (std::uint64_t s = 0; s < 64 && !(saw_fwd && saw_rev); ++s) {
      auto d = orient_pair({qa}, models, RobustnessRule{}, s);
      (d.forward ? saw_fwd : saw_rev) = true;
    }
    CHECK(saw_fwd);
    CHECK(saw_rev);
  }
}

TEST_CASE("orient_pair antisymmetry when no tie-break fires") {
  auto qa = answerable("q1", "the gold answer");
  auto models = scripted_models(qa, 4, 3, 1);
  auto fwd = orient_pair({qa}, models, RobustnessRule{}, 0);
  // swap sides
  for (auto& m : models) std::swap(m.side_a, m.side_b);
  auto rev = orient_pair({qa}, models, RobustnessRule{}, 0);
  CHECK(fwd.forward != rev.forward);
  CHECK(fwd.n_forward == rev.n_reverse);
  CHECK(fwd.q_forward == rev.q_reverse);
}

TEST_CASE("build_challenge_set keeps reserved questions and dev-set originals") {
  // Pair 1: context_a is in the dev set, q1 forward-fails -> kept.
  // Pair 2: no model fails either way -> dropped.
  auto q1 = answerable("q1", "gold answer alpha");
  auto q2 = answerable("q2", "gold answer beta");
  PairInput p1{"Page One", "dev context one", "perturbed context one", {q1}, {"Page One", 1, 2}};
  PairInput p2{"Page Two", "dev context two", "perturbed context two", {q2}, {"Page Two", 3, 4}};

  std::vector<ModelPredictions> models(2);
  models[0].model_name = "m0";
  models[0].side_a = {{"q1", "gold answer alpha"}, {"q2", "zz"}};
  models[0].side_b = {{"q1", "zz"}, {"q2", "zz"}};
  models[1].model_name = "m1";
  models[1].side_a = {{"q1", "gold answer alpha"}, {"q2", "zz"}};
  models[1].side_b = {{"q1", "gold answer alpha"}, {"q2", "zz"}};

  mrc::MrcDataset dev;
  dev.schema = mrc::Schema::SquadV1;
  dev.articles = {{"Page One", {{"dev context one", {}}, {"dev context two", {}}}}};

  auto result = build_challenge_set({p1, p2}, models, dev, RobustnessRule{}, 0);
  REQUIRE(result.set.original.articles.size() == 1);
  CHECK(result.set.original.articles[0].paragraphs[0].context == "dev context one");
  CHECK(result.set.perturbed.articles[0].paragraphs[0].context == "perturbed context one");
  REQUIRE(result.set.original.articles[0].paragraphs[0].qas.size() == 1);
  CHECK(result.set.original.articles[0].paragraphs[0].qas[0].qid == "q1");
  CHECK(result.decisions.size() == 2);

  // original missing from the dev set -> excluded entirely
  mrc::MrcDataset empty_dev;
  empty_dev.schema = mrc::Schema::SquadV1;
  empty_dev.articles = {{"Other", {{"a different context", {}}}}};
  CHECK_THROWS_AS(build_challenge_set({p1, p2}, models, empty_dev, RobustnessRule{}, 0), Error);
}

TEST_CASE("build_challenge_set resolves duplicate originals by reserved questions") {
  auto q1 = answerable("q1", "gold alpha");
  auto q2 = answerable("q2", "gold beta");
  auto q3 = answerable("q3", "gold gamma");
  // same original context in both pairs; second pair reserves two questions
  PairInput p1{"Page A", "shared original", "pert one", {q1}, {"Page A", 1, 2}};
  PairInput p2{"Page B", "shared original", "pert two", {q2, q3}, {"Page B", 3, 4}};
  std::vector<ModelPredictions> models(1);
  models[0].model_name = "m";
  models[0].side_a = {{"q1", "gold alpha"}, {"q2", "gold beta"}, {"q3", "gold gamma"}};
  models[0].side_b = {{"q1", "zz"}, {"q2", "zz"}, {"q3", "zz"}};
  mrc::MrcDataset dev;
  dev.schema = mrc::Schema::SquadV1;
  dev.articles = {{"t", {{"shared original", {}}}}};
  auto result = build_challenge_set({p1, p2}, models, dev, RobustnessRule{}, 0);
  REQUIRE(result.set.original.articles.size() == 1);
  CHECK(result.set.original.articles[0].paragraphs[0].qas.size() == 2);  // p2 won
  CHECK(result.set.perturbed.articles[0].paragraphs[0].context == "pert two");
}

TEST_CASE("classify_cases precedence and thresholds") {
  auto qa = answerable("q", "gold span");
  auto make = [&](const std::string& a, const std::string& b) {
    ModelPredictions m;
    m.side_a = {{"q", a}};
    m.side_b = {{"q", b}};
    return m;
  };
  const std::string G = "gold span", W = "zzz";

  // single model Correct -> Wrong = C2W
  auto labels = classify_cases({make(G, W)}, {qa});
  REQUIRE(labels.count("q"));
  CHECK(labels.at("q") == CaseLabel::C2W);

  // all correct on both = C2C
  labels = classify_cases({make(G, G), make(G, G)}, {qa});
  CHECK(labels.at("q") == CaseLabel::C2C);

  // one model W2C only -> no label ("at least two" rule)
  labels = classify_cases({make(W, G), make(W, W)}, {qa});
  CHECK(labels.count("q") == 0);

  // two models W2C -> W2C
  labels = classify_cases({make(W, G), make(W, G)}, {qa});
  CHECK(labels.at("q") == CaseLabel::W2C);

  // precedence: C2W beats W2C when both hold across models
  labels = classify_cases({make(G, W), make(W, G), make(W, G)}, {qa});
  CHECK(labels.at("q") == CaseLabel::C2W);

  // precedence is total: exactly one label per qid by construction
  labels = classify_cases({make(G, G), make(G, W)}, {qa});
  CHECK(labels.at("q") == CaseLabel::C2W);
}

TEST_CASE("perturbation_magnitude edit distance") {
  CHECK(perturbation_magnitude("", "") == 0);
  CHECK(perturbation_magnitude("same text", "same text") == 0);
  CHECK(perturbation_magnitude("abc", "abd") == 1);
  CHECK(perturbation_magnitude("abc", "") == 3);
  CHECK(perturbation_magnitude("kitten", "sitting") == 3);
  // byte-level: multi-byte characters count per byte
  CHECK(perturbation_magnitude("a", "\xc3\xa9") == 2);  // 'a' -> e-acute (2 bytes)
}

namespace {

// independent full-matrix DP oracle
std::uint64_t edit_distance_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::uint64_t>> dp(a.size() + 1,
                                             std::vector<std::uint64_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) dp[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) dp[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                           dp[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return dp[a.size()][b.size()];
}

std::string random_bytes(rng::Rng& rng, std::size_t max_len) {
  std::string s;
  const std::size_t n = rng.index(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng.index(4)));
  return s;
}

}  // namespace

TEST_CASE("perturbation_magnitude agrees with the DP oracle and metric axioms") {
  rng::Rng rng(404);
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_bytes(rng, 24);
    const std::string b = random_bytes(rng, 24);
    const std::string c = random_bytes(rng, 24);
    const std::uint64_t ab = perturbation_magnitude(a, b);
    CHECK(ab == edit_distance_oracle(a, b));
    CHECK(ab == perturbation_magnitude(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(ab <= perturbation_magnitude(a, c) + perturbation_magnitude(c, b));
  }
}

TEST_CASE("point_biserial closed form and errors") {
  // x=[1,2,3,4], y=[0,0,1,1]: r = 2 / sqrt(5)
  const double r = point_biserial({1, 2, 3, 4}, {0, 0, 1, 1});
  CHECK(r == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  // perfectly anti-separated flips the sign
  CHECK(point_biserial({1, 2, 3, 4}, {1, 1, 0, 0}) ==
        doctest::Approx(-2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(point_biserial({1, 1, 1, 1}, {0, 0, 1, 1}), Error);  // zero variance
  CHECK_THROWS_AS(point_biserial({1, 2, 3, 4}, {1, 1, 1, 1}), Error);  // one class empty
  CHECK_THROWS_AS(point_biserial({}, {}), Error);
}

TEST_CASE("answer_sentence_unmodified_rate on a hand-counted fixture") {
  // Original has three sentences; answers placed per sentence. The perturbed
  // version rewords sentence 2 and keeps sentences 1 and 3 verbatim.
  const std::string orig =
      "Alpha built the first engine in 1901. Beta sold the engine to Gamma. "
      "Delta retired in 1950.";
  const std::string pert =
      "Alpha built the first engine in 1901. Beta transferred the engine to Gamma. "
      "Delta retired in 1950.";
  std::vector<AnalyzedPair> pairs;
  AnalyzedPair pair;
  pair.original = orig;
  pair.perturbed = pert;
  // hand count: q_a (1901, sent 1) unmodified; q_b (Gamma, sent 2) modified;
  // q_c (1950, sent 3) unmodified; q_d (engine: sentences 1 AND 2 -> modified);
  // 10 questions total: 6 unmodified, 4 modified -> 60%
  pair.qas = {answerable("a1", "1901"),  answerable("a2", "1901"),
              answerable("b1", "Beta sold"), answerable("b2", "sold the engine"),
              answerable("c1", "1950"),  answerable("c2", "Delta retired"),
              answerable("c3", "retired in 1950"), answerable("a3", "Alpha built"),
              answerable("d1", "engine"), answerable("b3", "Beta")};
  // d1 "engine": first occurrence is in sentence 1 (unmodified) -> counts
  // as unmodified; recount: a1,a2,a3,c1,c2,c3,d1 unmodified = 7; b1,b2,b3
  // modified = 3 -> 70%
  pairs.push_back(pair);
  CHECK(answer_sentence_unmodified_rate(pairs) == doctest::Approx(70.0).epsilon(1e-9));
}

TEST_CASE("answer sentence rate counts edits outside answer sentences as unmodified") {
  AnalyzedPair pair;
  pair.original = "The answer is here. Some filler text follows.";
  pair.perturbed = "The answer is here. Completely different filler.";
  pair.qas = {answerable("q", "answer")};
  CHECK(answer_sentence_unmodified_rate({pair}) == 100.0);
  pair.perturbed = "The answer sits here. Some filler text follows.";
  CHECK(answer_sentence_unmodified_rate({pair}) == 0.0);
}
