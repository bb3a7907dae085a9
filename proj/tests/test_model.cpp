// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <pimc/model.hpp>

#include <gtest/gtest.h>

using namespace pimc;
using namespace pimc::testing;

namespace
{

state_set named( const chain< param_interval >& m, std::initializer_list< const char* > names )
{
    state_set out;
    for ( auto n : names )
        out.insert( m.index_of( n ) );
    return out;
}

} // namespace

TEST( Model, SuccOfFig5 )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_EQ( succ( p, p.index_of( "s2" ) ), named( p, { "s1", "s2", "s4" } ) );
    EXPECT_EQ( succ( p, p.index_of( "s3" ) ), named( p, { "s3" } ) );
}

TEST( Model, PredOfFig5 )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_EQ( pred( p, p.index_of( "s3" ) ), named( p, { "s1", "s3", "s4" } ) );
    EXPECT_TRUE( pred( p, p.index_of( "s0" ) ).empty() );
}

TEST( Model, ZeroIntervalsAreNotPotential )
{
    auto p = std::get< param_imc >( parse_model( "pimc\nstates a b\ninit a\na -> b [0, 0]\na -> a [0,0]\nb -> b [1,1]\n" ) );
    EXPECT_TRUE( succ( p, 0 ).empty() );
    EXPECT_EQ( pred( p, 1 ), state_set{ 1 } );
    EXPECT_EQ( p.size(), 3u );
}

TEST( Model, UnknownStateIsAnError )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_THROW( succ( p, 17 ), error );
    EXPECT_THROW( pred( p, 5 ), error );
}

TEST( Model, InstantiateFig5GivesFig3 )
{
    auto p = load_pimc( "fig5.pimc" );
    auto i = load_imc( "fig3_imc.imc" );
    EXPECT_EQ( instantiate( p, { { "p", R( "0.6" ) }, { "q", R( "0.5" ) } } ), i );
}

TEST( Model, ConstantPimcInstantiatesToItself )
{
    auto i = load_imc( "fig3_imc.imc" );
    EXPECT_EQ( instantiate( to_param_imc( i ), {} ), i );
}

TEST( Model, InconsistentEndpointsGiveEmptyInterval )
{
    auto p = std::get< param_imc >(
        parse_model( "pimc\nparams q\nstates a b\ninit a\na -> b [0.3, q]\na -> a [0, 1]\nb -> b [1,1]\n" ) );
    auto i = instantiate( p, { { "q", R( "0.1" ) } } );
    const interval* iv = i.find( 0, 1 );
    ASSERT_NE( iv, nullptr );
    EXPECT_TRUE( iv->empty );
    EXPECT_FALSE( *iv == interval::point( 0 ) );
    EXPECT_FALSE( is_potential( *iv ) );
    // Out of [0,1] endpoints are empty as well.
    EXPECT_TRUE( interval::closed( R( "-1/2" ), R( "1/2" ) ).empty );
    EXPECT_TRUE( interval::closed( R( "1/2" ), R( "3/2" ) ).empty );
}

TEST( Model, InstantiateReportsDivisionByZero )
{
    auto p = std::get< param_imc >(
        parse_model( "pimc\nparams q\nstates a b\ninit a\na -> b [0, 1/q]\nb -> b [1,1]\n" ) );
    try {
        instantiate( p, { { "q", 0 } } );
        FAIL();
    } catch ( const division_by_zero& e ) {
        EXPECT_NE( std::string( e.what() ).find( "a -> b" ), std::string::npos );
    }
}

TEST( Model, ValuationMustBeTotal )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_THROW( instantiate( p, { { "p", 0 } } ), error );
    EXPECT_THROW( instantiate( p, { { "p", 0 }, { "q", 0 }, { "r", 0 } } ), error );
}

TEST( Model, ValidateMc )
{
    EXPECT_TRUE( validate_mc( load_mc( "fig1_m1.mc" ) ).ok() );
    auto short_row = std::get< mc >( parse_model( "mc\nstates a b\ninit a\na -> b 0.9\nb -> b 1\n" ) );
    auto report = validate_mc( short_row );
    ASSERT_EQ( report.violations.size(), 1u );
    EXPECT_EQ( report.violations[ 0 ].state, 0u );
    EXPECT_EQ( report.violations[ 0 ].row_sum, R( "9/10" ) );
    auto negative = std::get< mc >( parse_model( "mc\nstates a b\ninit a\na -> b 0 - 1/2\na -> a 3/2\nb -> b 1\n" ) );
    auto r2 = validate_mc( negative );
    ASSERT_EQ( r2.violations.size(), 1u );
    EXPECT_TRUE( r2.violations[ 0 ].has_negative );
    EXPECT_TRUE( r2.violations[ 0 ].has_above_one );
}

TEST( Model, SizeConvention )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_EQ( p.state_count(), 5u );
    EXPECT_EQ( p.transition_count(), 10u );
    EXPECT_EQ( p.size(), 15u );
}

TEST( ModelProperty, InstantiationPreservesShapeAndNeverGrows )
{
    auto p = load_pimc( "fig5.pimc" );
    for ( int a = 0; a <= 4; ++a )
        for ( int b = 0; b <= 4; ++b ) {
            valuation v{ { "p", make_rational( a, 4 ) }, { "q", make_rational( b, 4 ) } };
            auto i = instantiate( p, v );
            EXPECT_EQ( i.state_count(), p.state_count() );
            EXPECT_EQ( i.initial(), p.initial() );
            EXPECT_EQ( i.labels(), p.labels() );
            EXPECT_LE( i.size(), p.size() );
        }
}

TEST( ModelProperty, SuccPredDuality )
{
    rng g( 7 );
    for ( int round = 0; round < 50; ++round ) {
        auto i = random_imc( g, 1 + g.below( 6 ) );
        for ( state_index s = 0; s < i.state_count(); ++s )
            for ( state_index t = 0; t < i.state_count(); ++t )
                EXPECT_EQ( succ( i, s ).count( t ), pred( i, t ).count( s ) );
        auto all = pred_sets( i );
        for ( state_index s = 0; s < i.state_count(); ++s )
            EXPECT_EQ( all[ s ], pred( i, s ) );
    }
}

TEST( Model, BuilderAndRestriction )
{
    auto m = chain_builder< rational >()
                 .state( "a" )
                 .state( "b", { "x" } )
                 .state( "c" )
                 .initial( "a" )
                 .edge( "a", "b", 1 )
                 .edge( "b", "b", 1 )
                 .edge( "c", "a", 1 )
                 .build();
    auto r = restrict_to( m, { 0, 1 } );
    EXPECT_EQ( r.state_count(), 2u );
    EXPECT_EQ( r.labels_of( 1 ), label{ "x" } );
    EXPECT_THROW( restrict_to( m, { 1, 2 } ), error );
    EXPECT_EQ( reachable_from( m, 0 ), ( state_set{ 0, 1 } ) );
    EXPECT_EQ( states_with_label( m, { "x" } ), state_set{ 1 } );
    EXPECT_EQ( states_with_label( m, {}, label_match::subset ), ( state_set{ 0, 1, 2 } ) );
}
