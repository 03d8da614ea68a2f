#pragma once

#include "autoner/dictionary.hpp"
#include "autoner/matcher.hpp"
#include "test_util.hpp"

namespace fixtures {

// Chemical/Disease example: a typed singleton and an unknown-typed phrase.
inline autoner::Dictionary chem_dis_dictionary() {
  autoner::Dictionary d;
  d.add_entry({"Chemical", {"indomethacin"}, {}});
  d.add_entry({"Disease", {"renal", "failure"}, {}});
  d.unknown_phrases.push_back({"prostaglandin", "synthesis"});
  return d;
}

inline autoner::Sentence chem_dis_sentence() {
  return autoner::tokenize("Thus , by inhibition of prostaglandin synthesis , indomethacin decreased renal blood flow .");
}

// Laptop-review example with one AspectTerm type.
inline autoner::Dictionary laptop_dictionary() {
  autoner::Dictionary d;
  d.add_entry({"AspectTerm", {"ceramic", "unibody"}, {}});
  d.add_entry({"AspectTerm", {"battery"}, {}});
  d.unknown_phrases.push_back({"8gb", "ram"});
  return d;
}

inline autoner::Sentence laptop_sentence() {
  return autoner::tokenize("The ceramic unibody and 8GB RAM make it light , the battery lasts .");
}

}  // namespace fixtures
