#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace magrec {

// The seven recognizable types, ordered as reports print them.
enum class VehicleType {
    Motorbike,
    SedanSuv,
    LightTruck,
    Bus,
    MediumTruck,
    HeavyTruck,
    SuperTruck,
};

constexpr std::array<VehicleType, 7> kAllVehicleTypes = {
    VehicleType::Motorbike,  VehicleType::SedanSuv,   VehicleType::LightTruck,
    VehicleType::Bus,        VehicleType::MediumTruck, VehicleType::HeavyTruck,
    VehicleType::SuperTruck,
};

// Standard length intervals, half-open below: (lo, hi].
enum class LengthBin { B0_3, B3_6, B6_12, B12_20 };

constexpr std::array<LengthBin, 4> kAllLengthBins = {
    LengthBin::B0_3, LengthBin::B3_6, LengthBin::B6_12, LengthBin::B12_20};

struct LengthInterval {
    double lo;  // exclusive
    double hi;  // inclusive
};

constexpr LengthInterval interval_of(LengthBin bin) {
    switch (bin) {
        case LengthBin::B0_3: return {0.0, 3.0};
        case LengthBin::B3_6: return {3.0, 6.0};
        case LengthBin::B6_12: return {6.0, 12.0};
        case LengthBin::B12_20: return {12.0, 20.0};
    }
    return {0.0, 0.0};
}

constexpr LengthBin bin_of(VehicleType type) {
    switch (type) {
        case VehicleType::Motorbike: return LengthBin::B0_3;
        case VehicleType::SedanSuv: return LengthBin::B3_6;
        case VehicleType::LightTruck: return LengthBin::B3_6;
        case VehicleType::Bus: return LengthBin::B6_12;
        case VehicleType::MediumTruck: return LengthBin::B6_12;
        case VehicleType::HeavyTruck: return LengthBin::B6_12;
        case VehicleType::SuperTruck: return LengthBin::B12_20;
    }
    return LengthBin::B0_3;
}

std::string_view to_string(VehicleType type);
std::string_view to_string(LengthBin bin);
std::optional<VehicleType> vehicle_type_from_string(std::string_view name);
std::optional<LengthBin> length_bin_from_string(std::string_view name);

struct VehicleLabel {
    VehicleType vehicle_type = VehicleType::SedanSuv;
    double true_length_m = 0.0;
    std::optional<double> true_speed_kmh;
};

}  // namespace magrec
