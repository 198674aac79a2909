#pragma once

#include <array>
#include <string_view>

namespace ghe {

enum class Axis { x = 0, y = 1, z = 2, t = 3 };

inline constexpr std::array<Axis, 4> kAxes = {Axis::x, Axis::y, Axis::z, Axis::t};

constexpr std::string_view axis_name(Axis a)
{
    constexpr std::array<std::string_view, 4> names = {"x", "y", "z", "t"};
    return names[static_cast<int>(a)];
}

/// A spacetime point (x, y, z, t).
struct Point4 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;

    constexpr double operator[](Axis a) const
    {
        switch (a) {
        case Axis::x: return x;
        case Axis::y: return y;
        case Axis::z: return z;
        case Axis::t: return t;
        }
        return 0.0;
    }

    constexpr Point4 shifted(Axis a, double h) const
    {
        Point4 q = *this;
        switch (a) {
        case Axis::x: q.x += h; break;
        case Axis::y: q.y += h; break;
        case Axis::z: q.z += h; break;
        case Axis::t: q.t += h; break;
        }
        return q;
    }

    bool operator==(const Point4&) const = default;
};

}  // namespace ghe
