// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "qtraj/dpo.hpp"

namespace qtraj::cli {

struct DpoTableRow {
  double b = 0.0;
  double chi = 0.0;
  double eta = 0.0;
  double noise = 0.0;
  double gamma = 0.0;  // b sqrt(noise)
  Covariances scaled;  // B-only covariances
  double dy = 0.0;
  double purity = 0.0;             // closed form
  double purity_covariance = 0.0;  // from the scaled covariances
  double purity_full = 0.0;        // full covariances at (noise, gamma)
  double p_me = 0.0;
};

std::vector<DpoTableRow> dpo_table(const DpoTableParams& p);
std::vector<std::string> dpo_columns();
void write_dpo_csv(std::ostream& os, const std::vector<DpoTableRow>& rows,
                   const std::vector<std::string>& header_comments = {});

// Each command writes its CSV files into config.out_dir and returns their
// paths.
std::vector<std::string> run_trajectory(const RunConfig& config);
std::vector<std::string> run_purity_sweep(const RunConfig& config);
std::vector<std::string> run_effective_bandwidth(const RunConfig& config);
std::vector<std::string> run_dpo_table(const RunConfig& config);

// Full command line entry point; returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qtraj::cli
