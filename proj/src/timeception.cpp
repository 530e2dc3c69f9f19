// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tc/timeception.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace tc {

std::string kernel_dump_csv(const std::vector<KernelDumpRow>& rows) {
    std::ostringstream os;
    os << "layer,group,branch,kernel_size,dilation,weight_index,value\n";
    char buf[64];
    for (const KernelDumpRow& r : rows) {
        // %.17g round-trips doubles exactly.
        std::snprintf(buf, sizeof(buf), "%.17g", r.value);
        os << r.layer << "," << r.group << "," << r.branch << "," << r.kernel_size << ","
           << r.dilation << "," << r.weight_index << "," << buf << "\n";
    }
    return os.str();
}

std::vector<KernelDumpRow> parse_kernel_dump_csv(const std::string& csv) {
    std::vector<KernelDumpRow> rows;
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line) || line != "layer,group,branch,kernel_size,dilation,weight_index,value")
        throw FormatError("kernel dump: bad header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        KernelDumpRow r{};
        if (std::sscanf(line.c_str(),
                        "%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%lf",
                        &r.layer, &r.group, &r.branch, &r.kernel_size, &r.dilation, &r.weight_index,
                        &r.value) != 7)
            throw FormatError("kernel dump: bad row: " + line);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tc
