// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpp/errors.hpp"

namespace mpp {
namespace {

using nlohmann::json;

// Window key "w,a;w,a;..." with the oldest pair first; empty for k = 0.
std::string window_key(const MppInstance& inst, const SliceSpace& sp,
                       std::int64_t h) {
  std::ostringstream os;
  std::vector<int> digits(sp.length);  // most-significant (oldest) first
  std::int64_t rest = h;
  for (int i = sp.length - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(rest % sp.n_pairs);
    rest /= sp.n_pairs;
  }
  for (int i = 0; i < sp.length; ++i) {
    if (i) os << ';';
    os << inst.pair_state(digits[i]) << ',' << inst.pair_action(digits[i]);
  }
  return os.str();
}

std::int64_t parse_window_key(const MppInstance& inst, const SliceSpace& sp,
                              const std::string& key) {
  std::int64_t h = 0;
  int count = 0;
  std::istringstream is(key);
  std::string part;
  while (std::getline(is, part, ';')) {
    int w = -1, a = -1;
    char comma = 0;
    std::istringstream ps(part);
    if (!(ps >> w >> comma >> a) || comma != ',' || w < 0 ||
        w >= inst.n_states || a < 0 || a >= inst.n_actions)
      throw MppError("bad window key: " + key);
    h = h * sp.n_pairs + inst.pair_index(w, a);
    ++count;
  }
  if (count != sp.length) throw MppError("window key has wrong length: " + key);
  return h;
}

}  // namespace

MppInstance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw MppError(std::string("instance JSON parse error: ") + e.what());
  }
  MppInstance inst;
  try {
    inst.n_states = j.at("states").get<int>();
    inst.n_actions = j.at("actions").get<int>();
    inst.name = j.value("name", std::string());
    for (const auto& per_state : j.at("kernel"))
      for (const auto& per_action : per_state)
        for (const auto& p : per_action)
          inst.kernel.push_back(p.get<double>());
    for (const auto& per_state : j.at("receiver_utility"))
      for (const auto& u : per_state)
        inst.receiver_utility.push_back(u.get<double>());
    for (const auto& per_state : j.at("sender_reward"))
      for (const auto& v : per_state)
        inst.sender_reward.push_back(v.get<double>());
  } catch (const json::exception& e) {
    throw MppError(std::string("instance JSON shape error: ") + e.what());
  }
  const auto issues = validate_instance(inst);
  if (!issues.empty()) throw MppError("invalid instance: " + issues.front());
  return inst;
}

MppInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MppError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string instance_to_json(const MppInstance& inst) {
  json j;
  j["name"] = inst.name;
  j["states"] = inst.n_states;
  j["actions"] = inst.n_actions;
  json kernel = json::array(), ru = json::array(), sr = json::array();
  for (int w = 0; w < inst.n_states; ++w) {
    json krow = json::array(), urow = json::array(), vrow = json::array();
    for (int a = 0; a < inst.n_actions; ++a) {
      json prow = json::array();
      for (int w2 = 0; w2 < inst.n_states; ++w2) prow.push_back(inst.p(w, a, w2));
      krow.push_back(prow);
      urow.push_back(inst.u(w, a));
      vrow.push_back(inst.v(w, a));
    }
    kernel.push_back(krow);
    ru.push_back(urow);
    sr.push_back(vrow);
  }
  j["kernel"] = kernel;
  j["receiver_utility"] = ru;
  j["sender_reward"] = sr;
  return j.dump(2);
}

SignalingMechanism parse_mechanism(const MppInstance& inst,
                                   const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw MppError(std::string("mechanism JSON parse error: ") + e.what());
  }
  SignalingMechanism sigma;
  try {
    const int k = j.at("memory").get<int>();
    sigma = SignalingMechanism(k, inst.n_states, inst.n_actions);
    const SliceSpace sp = sigma.window();
    for (const auto& [key, rows] : j.at("table").items()) {
      const std::int64_t h = parse_window_key(inst, sp, key);
      for (int w = 0; w < inst.n_states; ++w)
        for (int a = 0; a < inst.n_actions; ++a)
          sigma.prob(h, w, a) = rows.at(w).at(a).get<double>();
    }
  } catch (const json::exception& e) {
    throw MppError(std::string("mechanism JSON shape error: ") + e.what());
  }
  const auto issues = sigma.validate();
  if (!issues.empty()) throw MppError("invalid mechanism: " + issues.front());
  return sigma;
}

std::string mechanism_to_json(const MppInstance& inst,
                              const SignalingMechanism& sigma) {
  json table = json::object();
  const SliceSpace sp = sigma.window();
  for (std::int64_t h = 0; h < sp.size; ++h) {
    json rows = json::array();
    for (int w = 0; w < inst.n_states; ++w) {
      json row = json::array();
      for (int a = 0; a < inst.n_actions; ++a) row.push_back(sigma.prob(h, w, a));
      rows.push_back(row);
    }
    table[window_key(inst, sp, h)] = rows;
  }
  json j;
  j["memory"] = sigma.memory;
  j["table"] = table;
  return j.dump(2);
}

std::string robust_to_json(const MppInstance& inst,
                           const RobustMechanism& rm) {
  json j;
  j["epsilon"] = rm.epsilon;
  j["delta"] = rm.delta;
  j["regularity_margin"] = rm.d_min;
  j["value_bound"] = rm.value_bound;
  j["value_bound_coarse"] = rm.value_bound_coarse;
  json signals = json::array();
  for (size_t s = 0; s < rm.signal_weights.size(); ++s) {
    json sig;
    sig["weight"] = rm.signal_weights[s];
    sig["action"] = rm.signal_action[s];
    sig["posterior"] = rm.signal_posteriors[s];
    signals.push_back(sig);
  }
  j["signals"] = signals;
  j["collapsed"] = json::parse(mechanism_to_json(inst, rm.collapsed));
  return j.dump(2);
}

}  // namespace mpp
