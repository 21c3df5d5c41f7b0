#pragma once

#include "stanceval/text_norm.hpp"

namespace stanceval {

// Sentence BLEU on token sequences, order N = min(4, |cand|, |ref|), uniform
// 1/N weights, clipped n-gram precisions. For n >= 2 a zero match count is
// smoothed to (0+1)/(total+1); a zero unigram precision yields 0. Brevity
// penalty min(1, exp(1 - |ref|/|cand|)). Empty candidate or reference -> 0.
double bleu(const TokenSeq& candidate, const TokenSeq& reference);

// ROUGE-L F1: L = LCS length, P = L/|cand|, R = L/|ref|, harmonic mean;
// 0 when L = 0 or either side is empty.
double rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

}  // namespace stanceval
