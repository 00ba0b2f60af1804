// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_IO_HPP
#define MPP_IO_HPP

#include <iosfwd>
#include <string>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/robust.hpp"

namespace mpp {

MppInstance load_instance(const std::string& path);
MppInstance parse_instance(const std::string& json_text);
std::string instance_to_json(const MppInstance& inst);

SignalingMechanism parse_mechanism(const MppInstance& inst,
                                   const std::string& json_text);
std::string mechanism_to_json(const MppInstance& inst,
                              const SignalingMechanism& sigma);

std::string robust_to_json(const MppInstance& inst, const RobustMechanism& rm);

}  // namespace mpp

#endif  // MPP_IO_HPP
