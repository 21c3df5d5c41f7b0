// Compares the serial reference corpus scorer against the OpenMP kernel on a
// synthetic workload and checks the outputs agree.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "stanceval/embedding.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/target_eval.hpp"

using namespace stanceval;

namespace {

std::string synth_target(SplitMix64& rng, int tokens) {
  // CJK codepoints so the mixed tokenizer splits per character
  std::string t;
  for (int k = 0; k < tokens; ++k) append_utf8(t, static_cast<char32_t>(0x4E00 + rng.next_below(2000)));
  return t;
}

void build_corpus(std::size_t n, std::vector<Sample>& samples, std::vector<Prediction>& preds) {
  SplitMix64 rng(4099);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    const int targets = 2 + static_cast<int>(rng.next_below(6));
    for (int t = 0; t < targets; ++t) {
      s.pairs.push_back({synth_target(rng, 6 + static_cast<int>(rng.next_below(18))),
                         static_cast<Stance>(rng.next_below(3))});
    }
    s.text = "text " + s.id;
    Prediction p;
    p.id = s.id;
    for (const auto& gold : s.pairs) {
      std::string guess = gold.target;
      if (rng.next_below(2) == 0 && guess.size() > 3) guess.resize(guess.size() - 3);
      p.pairs.push_back({guess, gold.stance});
    }
    samples.push_back(std::move(s));
    preds.push_back(std::move(p));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 7000;
  int threads = 4;
  if (argc > 1) n = static_cast<std::size_t>(std::stoul(argv[1]));
  if (argc > 2) threads = std::stoi(argv[2]);

  std::vector<Sample> samples;
  std::vector<Prediction> preds;
  build_corpus(n, samples, preds);
  OneHotEmbedder embedder;
  EvalConfig cfg;

  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = score_corpus_serial(samples, preds, cfg, embedder);
  const auto t1 = std::chrono::steady_clock::now();
  const auto parallel = score_corpus(samples, preds, cfg, embedder, threads);
  const auto t2 = std::chrono::steady_clock::now();

  bool equal = serial.size() == parallel.size();
  for (std::size_t i = 0; equal && i < serial.size(); ++i)
    equal = serial[i].c_score == parallel[i].c_score && serial[i].recall == parallel[i].recall &&
            serial[i].sample.bertscore == parallel[i].sample.bertscore;

  const double ts = std::chrono::duration<double>(t1 - t0).count();
  const double tp = std::chrono::duration<double>(t2 - t1).count();
  std::printf("samples: %zu\n", n);
  std::printf("serial:   %.3f s\n", ts);
  std::printf("parallel: %.3f s  (%d threads, %d hardware)\n", tp, threads,
              omp_get_num_procs());
  std::printf("speedup:  %.2fx\n", ts / tp);
  std::printf("outputs identical: %s\n", equal ? "yes" : "NO");
  return equal ? 0 : 1;
}
